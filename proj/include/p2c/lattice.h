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

#ifndef P2C_LATTICE_H_
#define P2C_LATTICE_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "p2c/lexicon.h"

namespace p2c {

enum class NodeKind { kChar, kWord };

struct LexiconRef {
  std::size_t lexicon = 0;  // position in the lexicon list passed to inject
  std::size_t entry = 0;
  bool operator==(const LexiconRef&) const = default;
};

struct LatticeNode {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::vector<CharId> surface;
  NodeKind kind = NodeKind::kChar;
  // Stand-in for a syllable with no candidates; surfaces as kUnknownId.
  bool placeholder = false;
  std::optional<LexiconRef> source;

  std::size_t length() const { return end - start; }
  bool operator==(const LatticeNode&) const = default;
};

// Nodes live in one vector in insertion order; the node index is the
// tie-break key used by the decoder.
class Lattice {
 public:
  std::size_t size() const { return n_; }
  const std::vector<SyllableId>& pinyin() const { return pinyin_; }
  bool incomplete() const { return incomplete_; }

  const std::vector<LatticeNode>& nodes() const { return nodes_; }
  const LatticeNode& node(std::size_t index) const { return nodes_[index]; }
  // Node indices starting at / ending at `pos`, in insertion order.
  const std::vector<std::size_t>& starting_at(std::size_t pos) const {
    return by_start_[pos];
  }
  const std::vector<std::size_t>& ending_at(std::size_t pos) const {
    return by_end_[pos];
  }

  // Returns false (and adds nothing) for a duplicate (start, end, surface).
  bool add(LatticeNode node);

 private:
  friend Lattice build_lattice(std::span<const SyllableId>, const CharDict&);

  std::size_t n_ = 0;
  std::vector<SyllableId> pinyin_;
  bool incomplete_ = false;
  std::vector<LatticeNode> nodes_;
  std::vector<std::vector<std::size_t>> by_start_;
  std::vector<std::vector<std::size_t>> by_end_;  // index n_ is valid
};

// Throws EmptyInput for an empty sequence.
Lattice build_lattice(std::span<const SyllableId> pinyin, const CharDict& dict);
Lattice build_lattice(const PinyinSequence& pinyin, const CharDict& dict);

// Adds a word node for every lexicon match at every start position.
Lattice inject_words(Lattice lattice, std::span<const WordLexicon* const> lexicons);
Lattice inject_words(Lattice lattice, const WordLexicon& lexicon);

// Number of node tilings of [0, n), saturating at SIZE_MAX.
std::size_t count_paths(const Lattice& lattice);

// One "start end surface kind" line per node, insertion order.
void dump_lattice(std::ostream& out, const Lattice& lattice,
                  const CharDict& dict);

const char* to_string(NodeKind kind);

}  // namespace p2c

#endif  // P2C_LATTICE_H_
