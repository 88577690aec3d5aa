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

#ifndef P2C_EVAL_H_
#define P2C_EVAL_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "p2c/corpus.h"
#include "p2c/engine.h"

namespace p2c {

// (correct, total). Throws LengthMismatch.
std::pair<std::size_t, std::size_t> char_precision(std::u32string_view hyp,
                                                   std::u32string_view ref);
bool sentence_exact(std::u32string_view hyp, std::u32string_view ref);

struct EvalTotals {
  std::size_t sequences = 0;
  std::size_t tokens = 0;
  std::size_t correct_tokens = 0;
  std::size_t correct_sequences = 0;
  std::size_t skipped = 0;
  bool operator==(const EvalTotals&) const = default;
};

struct EvalReport {
  EvalTotals totals;
  // Micro-averaged over every evaluated character.
  double char_precision = 0.0;
  double sentence_precision = 0.0;
  // Precisions are reported as 0 when nothing was evaluated.
  bool empty = true;
  double decode_ms = 0.0;
  double ms_per_token = 0.0;
  std::string engine;
};

struct EvalOptions {
  ConvertOptions convert;
};

// Top-1 conversion of every sample. Malformed lines and failed conversions
// are counted in totals.skipped. Timing covers conversion calls only.
EvalReport evaluate(std::istream& corpus, const Engine& engine,
                    const EvalOptions& options = {});
EvalReport evaluate(const std::string& corpus_path, const Engine& engine,
                    const EvalOptions& options = {});

// key=value lines; timing keys (decode_ms, ms_per_token) come last.
void write_report(std::ostream& out, const EvalReport& report);
void print_table(std::ostream& out, const EvalReport& report,
                 std::string_view model_name);

}  // namespace p2c

#endif  // P2C_EVAL_H_
