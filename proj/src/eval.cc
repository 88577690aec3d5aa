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

#include "p2c/eval.h"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

#include "p2c/error.h"
#include "p2c/utf8.h"

namespace p2c {

std::pair<std::size_t, std::size_t> char_precision(std::u32string_view hyp,
                                                   std::u32string_view ref) {
  if (hyp.size() != ref.size()) {
    throw LengthMismatch("hypothesis has " + std::to_string(hyp.size()) +
                         " characters, reference " +
                         std::to_string(ref.size()));
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < hyp.size(); ++i) correct += hyp[i] == ref[i];
  return {correct, hyp.size()};
}

bool sentence_exact(std::u32string_view hyp, std::u32string_view ref) {
  const auto [correct, total] = char_precision(hyp, ref);
  return correct == total;
}

EvalReport evaluate(std::istream& corpus, const Engine& engine,
                    const EvalOptions& options) {
  using clock = std::chrono::steady_clock;
  EvalReport report;
  report.engine = engine.describe();
  if (options.convert.mode) {
    report.engine += " (mode override ";
    report.engine += to_string(*options.convert.mode);
    report.engine += ")";
  }
  ConvertOptions convert_options = options.convert;
  convert_options.k = 1;

  clock::duration decode_time{};
  std::string line;
  std::size_t line_no = 0;
  auto& t = report.totals;
  while (std::getline(corpus, line)) {
    ++line_no;
    if (utf8::trim(line).empty()) continue;
    try {
      const CorpusLine sample = parse_corpus_line(line, line_no);
      if (sample.pinyin.size() != sample.chars.size() || sample.chars.empty()) {
        ++t.skipped;
        continue;
      }
      const auto start = clock::now();
      const auto conversion =
          convert_detailed(sample.pinyin, engine, convert_options);
      decode_time += clock::now() - start;
      std::u32string hyp;
      for (CharId id : conversion.paths.front().surface) {
        hyp.push_back(engine.dict->char_at(id));
      }
      const auto [correct, total] = char_precision(hyp, sample.chars);
      ++t.sequences;
      t.tokens += total;
      t.correct_tokens += correct;
      t.correct_sequences += correct == total;
    } catch (const Error&) {
      ++t.skipped;
    }
  }
  report.empty = t.tokens == 0;
  if (!report.empty) {
    report.char_precision = static_cast<double>(t.correct_tokens) /
                            static_cast<double>(t.tokens);
    report.sentence_precision = static_cast<double>(t.correct_sequences) /
                                static_cast<double>(t.sequences);
    report.decode_ms =
        std::chrono::duration<double, std::milli>(decode_time).count();
    report.ms_per_token = report.decode_ms / static_cast<double>(t.tokens);
  }
  return report;
}

EvalReport evaluate(const std::string& corpus_path, const Engine& engine,
                    const EvalOptions& options) {
  std::ifstream in(corpus_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + corpus_path);
  return evaluate(in, engine, options);
}

void write_report(std::ostream& out, const EvalReport& r) {
  char buf[64];
  const auto fixed = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };
  out << "engine=" << r.engine << '\n'
      << "sequences=" << r.totals.sequences << '\n'
      << "tokens=" << r.totals.tokens << '\n'
      << "correct_tokens=" << r.totals.correct_tokens << '\n'
      << "correct_sequences=" << r.totals.correct_sequences << '\n'
      << "skipped=" << r.totals.skipped << '\n'
      << "empty=" << (r.empty ? "true" : "false") << '\n'
      << "char_precision=" << fixed(r.char_precision) << '\n'
      << "sentence_precision=" << fixed(r.sentence_precision) << '\n'
      << "decode_ms=" << fixed(r.decode_ms) << '\n'
      << "ms_per_token=" << fixed(r.ms_per_token) << '\n';
}

void print_table(std::ostream& out, const EvalReport& r,
                 std::string_view model_name) {
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %16s %14s %10s\n", "Model",
                "Char_Precision", "Sen_Precision", "ms/token");
  out << line;
  std::snprintf(line, sizeof(line), "%-24.24s %15.2f%% %13.2f%% %10.3f\n",
                std::string(model_name).c_str(), 100.0 * r.char_precision,
                100.0 * r.sentence_precision, r.ms_per_token);
  out << line;
  if (r.empty) out << "(empty corpus: precisions undefined, shown as 0)\n";
  if (r.totals.skipped) out << "skipped samples: " << r.totals.skipped << '\n';
}

}  // namespace p2c
