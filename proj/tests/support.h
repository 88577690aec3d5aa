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

// Shared fixtures and generators for the unit and acceptance suites.

#ifndef P2C_TESTS_SUPPORT_H_
#define P2C_TESTS_SUPPORT_H_

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "p2c/decoder.h"
#include "p2c/emission.h"
#include "p2c/lattice.h"
#include "p2c/lexicon.h"
#include "p2c/ngram.h"
#include "p2c/pert.h"

namespace p2c::testing {

// Directory holding the committed fixtures (tests/data).
std::string data_dir();
std::string data_path(const std::string& name);

CharDict dict_from(const std::string& text);
WordLexicon lexicon_from(const std::string& text, const CharDict& dict,
                         const std::string& name = "test");

std::vector<CharId> ids(const CharDict& dict, std::u32string_view text);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

// An encoder with all-zero weights except the classifier bias, so that
// every position emits softmax(bias) regardless of input.
PertModel bias_only_pert(const CharDict& dict, const std::vector<float>& bias,
                         std::size_t max_len = 16);

// Emission rows given per position as {char id -> probability}; the rest of
// each row is filled uniformly so rows sum to one.
EmissionMatrix sparse_emission(
    std::size_t n, std::size_t vocab,
    const std::vector<std::vector<std::pair<CharId, double>>>& rows);

// A randomized decoding problem over a synthetic dictionary.
struct RandomInstance {
  std::shared_ptr<CharDict> dict;
  std::shared_ptr<WordLexicon> lexicon;
  Lattice lattice;
  EmissionMatrix em;
  std::shared_ptr<NgramModel> ngram;
  ScoreConfig cfg;
};

struct RandomSpec {
  std::size_t max_n = 6;
  std::size_t max_candidates = 4;
  std::size_t max_words = 4;
  bool random_lambdas = true;
  bool allow_combined = true;
  bool allow_unknown = false;  // occasionally include an unlisted syllable
};

RandomInstance random_instance(std::mt19937_64& rng, const RandomSpec& spec);

// Score of a tiling computed straight from the scoring rule, independent of
// the decoder's bookkeeping.
double reference_path_score(const Lattice& lattice,
                            const std::vector<std::size_t>& node_indices,
                            const EmissionMatrix& em, const NgramModel* ngram,
                            const ScoreConfig& cfg);

}  // namespace p2c::testing

#endif  // P2C_TESTS_SUPPORT_H_
