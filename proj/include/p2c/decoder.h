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

// Best-path search over a candidate lattice.
//
// A path is a tiling of [0, n) by lattice nodes. Its score is accumulated
// node by node, left to right:
//
//   score = sum_nodes  lambda_emit  * E(node)
//                    + lambda_trans * T(node)        (combined mode only)
//         + lambda_trans * ln P(eos | last char)     (combined mode only)
//
// E(node) is the log of the geometric mean of the encoder probabilities of the
// node's characters at their positions, each clamped below by the emission
// floor; a single character reduces to its own log probability. Each node
// contributes exactly one such term whatever its length, which is what lets
// a lexicon word outscore the same characters taken one by one.
//
// T(node) sums the bigram log probabilities of every adjacent character pair
// the node introduces: from the previous character (or bos) into its first
// character, then through its own characters.
//
// Exact score ties go to the path whose node-index sequence is
// lexicographically smallest, i.e. the one that picks earlier-inserted nodes
// first. Searches keyed on (position, last character) preserve that order.

#ifndef P2C_DECODER_H_
#define P2C_DECODER_H_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "p2c/emission.h"
#include "p2c/lattice.h"
#include "p2c/ngram.h"

namespace p2c {

enum class DecodeMode { kEmissionOnly, kCombined };

const char* to_string(DecodeMode mode);
// Accepts "emission" / "combined". Throws ConfigError.
DecodeMode parse_mode(std::string_view text);

struct ScoreConfig {
  double lambda_emit = 1.0;
  double lambda_trans = 1.0;
  double emission_floor = 1e-12;
  DecodeMode mode = DecodeMode::kCombined;

  // Throws ConfigError.
  void validate() const;
};

struct NodeScore {
  double emission = 0.0;    // lambda_emit * E(node)
  double transition = 0.0;  // lambda_trans * T(node), eos folded into the last
};

struct DecodedPath {
  std::vector<std::size_t> node_indices;
  std::vector<LatticeNode> nodes;
  std::vector<CharId> surface;
  double score = 0.0;
  std::vector<NodeScore> per_node;
};

double node_emission_logscore(const LatticeNode& node, const EmissionMatrix& em,
                              double floor);

// Throws ModeError (combined without a model, or mismatched lengths) and
// NoPath.
DecodedPath viterbi(const Lattice& lattice, const EmissionMatrix& em,
                    const NgramModel* ngram, const ScoreConfig& cfg);

// The k best distinct surfaces, best first. topk(.., 1)[0] == viterbi(..).
std::vector<DecodedPath> topk(const Lattice& lattice, const EmissionMatrix& em,
                              const NgramModel* ngram, const ScoreConfig& cfg,
                              std::size_t k);

// Exhaustive enumeration with the same scoring and tie-break.
inline constexpr std::size_t kBruteForcePathLimit = 1'000'000;

// Throws TooManyPaths above kBruteForcePathLimit.
DecodedPath brute_force(const Lattice& lattice, const EmissionMatrix& em,
                        const NgramModel* ngram, const ScoreConfig& cfg);

// Visits every tiling in lexicographic node-index order.
void for_each_path(const Lattice& lattice, const EmissionMatrix& em,
                   const NgramModel* ngram, const ScoreConfig& cfg,
                   const std::function<void(const DecodedPath&)>& visit);

}  // namespace p2c

#endif  // P2C_DECODER_H_
