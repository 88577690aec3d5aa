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

#ifndef P2C_ENGINE_H_
#define P2C_ENGINE_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "p2c/decoder.h"
#include "p2c/emission.h"
#include "p2c/lattice.h"
#include "p2c/lexicon.h"
#include "p2c/ngram.h"

namespace p2c {

// Everything a conversion needs. All members are immutable once assembled, so
// one engine can serve any number of concurrent conversions.
struct Engine {
  std::shared_ptr<const CharDict> dict;
  std::vector<std::shared_ptr<const WordLexicon>> lexicons;
  std::shared_ptr<const EmissionModel> emission;
  std::shared_ptr<const NgramModel> ngram;  // may be null in emission mode
  ScoreConfig score;
  std::size_t k = 5;

  std::string describe() const;
};

struct ConvertOptions {
  std::optional<std::size_t> k;
  std::optional<DecodeMode> mode;
  // Names of attached lexicons to use; all of them when unset.
  std::optional<std::vector<std::string>> lexicons;
};

struct Conversion {
  Lattice lattice;
  EmissionMatrix emission;
  std::vector<DecodedPath> paths;
};

// Lattice, lexicon injection, emission, k-best search. Throws EmptyInput,
// ConfigError for unknown lexicon names, and whatever the parts throw.
Conversion convert_detailed(const PinyinSequence& pinyin, const Engine& engine,
                            const ConvertOptions& options = {});
std::vector<DecodedPath> convert(const PinyinSequence& pinyin,
                                 const Engine& engine, std::size_t k);

// Lattice with the requested lexicons injected, no scoring.
Lattice engine_lattice(const PinyinSequence& pinyin, const Engine& engine,
                       const std::optional<std::vector<std::string>>& names = {});

// JSON engine description; relative paths resolve against the file's
// directory:
//   {"char_dict": "dict.txt", "lexicons": ["a.lex", {"name": "b", "path":
//   "b.lex"}], "weights": "model.pertw", "ngram": "bigram.bin",
//   "mode": "combined", "lambda_emit": 1, "lambda_trans": 1,
//   "emission_floor": 1e-12, "k": 5}
struct EngineConfigFile {
  std::string char_dict;
  std::vector<std::pair<std::string, std::string>> lexicons;  // name, path
  std::string weights;
  std::string ngram;
  ScoreConfig score;
  std::size_t k = 5;

  static EngineConfigFile load(const std::string& path);
};

// Loads every referenced file and cross-checks vocabulary checksums.
Engine assemble_engine(const EngineConfigFile& config);

}  // namespace p2c

#endif  // P2C_ENGINE_H_
