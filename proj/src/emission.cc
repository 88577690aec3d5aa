// Copyright 2026 The p2c Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "p2c/emission.h"

#include <algorithm>
#include <cmath>

#include "p2c/error.h"

namespace p2c {

EmissionMatrix::EmissionMatrix(std::size_t n, std::size_t vocab)
    : n_(n), vocab_(vocab), probs_(n * vocab, 0.0), log_probs_(n * vocab, 0.0) {}

EmissionMatrix EmissionMatrix::from_probs(std::size_t n, std::size_t vocab,
                                          std::vector<double> probs) {
  if (probs.size() != n * vocab) {
    throw LengthMismatch("emission table has " + std::to_string(probs.size()) +
                         " entries, expected " + std::to_string(n * vocab));
  }
  EmissionMatrix m;
  m.n_ = n;
  m.vocab_ = vocab;
  m.log_probs_.resize(probs.size());
  std::transform(probs.begin(), probs.end(), m.log_probs_.begin(),
                 [](double p) { return std::log(p); });
  m.probs_ = std::move(probs);
  return m;
}

CharId EmissionMatrix::argmax(std::size_t pos) const {
  auto r = row(pos);
  return static_cast<CharId>(std::max_element(r.begin(), r.end()) - r.begin());
}

EmissionMatrix TableEmission::emission(
    std::span<const SyllableId> pinyin) const {
  if (pinyin.size() != table_.size()) {
    throw LengthMismatch("table emission built for length " +
                         std::to_string(table_.size()) + ", got " +
                         std::to_string(pinyin.size()));
  }
  return table_;
}

}  // namespace p2c
