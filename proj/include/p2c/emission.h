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

#ifndef P2C_EMISSION_H_
#define P2C_EMISSION_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "p2c/lexicon.h"

namespace p2c {

// Per-position character distributions P(c_i | y_1..y_n), row-major n x vocab.
class EmissionMatrix {
 public:
  EmissionMatrix() = default;
  EmissionMatrix(std::size_t n, std::size_t vocab);

  // Rows are taken as given; log_probs become ln(probs).
  static EmissionMatrix from_probs(std::size_t n, std::size_t vocab,
                                   std::vector<double> probs);

  std::size_t size() const { return n_; }
  std::size_t vocab() const { return vocab_; }

  double prob(std::size_t pos, CharId id) const {
    return probs_[pos * vocab_ + static_cast<std::size_t>(id)];
  }
  double log_prob(std::size_t pos, CharId id) const {
    return log_probs_[pos * vocab_ + static_cast<std::size_t>(id)];
  }
  std::span<const double> row(std::size_t pos) const {
    return {probs_.data() + pos * vocab_, vocab_};
  }
  std::span<const double> log_row(std::size_t pos) const {
    return {log_probs_.data() + pos * vocab_, vocab_};
  }
  std::span<double> mutable_row(std::size_t pos) {
    return {probs_.data() + pos * vocab_, vocab_};
  }
  std::span<double> mutable_log_row(std::size_t pos) {
    return {log_probs_.data() + pos * vocab_, vocab_};
  }

  CharId argmax(std::size_t pos) const;

  bool operator==(const EmissionMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t vocab_ = 0;
  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

// Anything that can score characters per position: the PERT encoder, or a
// fixed table in tests.
class EmissionModel {
 public:
  virtual ~EmissionModel() = default;
  virtual EmissionMatrix emission(std::span<const SyllableId> pinyin) const = 0;
  virtual std::size_t char_vocab_size() const = 0;
  virtual std::size_t max_len() const = 0;
  virtual std::string describe() const = 0;
};

// Returns the same matrix for any input of matching length.
class TableEmission final : public EmissionModel {
 public:
  explicit TableEmission(EmissionMatrix table) : table_(std::move(table)) {}

  EmissionMatrix emission(std::span<const SyllableId> pinyin) const override;
  std::size_t char_vocab_size() const override { return table_.vocab(); }
  std::size_t max_len() const override { return table_.size(); }
  std::string describe() const override { return "table"; }

 private:
  EmissionMatrix table_;
};

}  // namespace p2c

#endif  // P2C_EMISSION_H_
