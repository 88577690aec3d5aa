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

#include "p2c/lattice.h"

#include <algorithm>
#include <limits>
#include <ostream>

#include "p2c/error.h"

namespace p2c {

bool Lattice::add(LatticeNode node) {
  for (std::size_t i : by_start_[node.start]) {
    const auto& other = nodes_[i];
    if (other.end == node.end && other.surface == node.surface) return false;
  }
  const std::size_t index = nodes_.size();
  by_start_[node.start].push_back(index);
  by_end_[node.end].push_back(index);
  nodes_.push_back(std::move(node));
  return true;
}

Lattice build_lattice(std::span<const SyllableId> pinyin,
                      const CharDict& dict) {
  if (pinyin.empty()) throw EmptyInput("empty pinyin sequence");
  Lattice lattice;
  lattice.n_ = pinyin.size();
  lattice.pinyin_.assign(pinyin.begin(), pinyin.end());
  lattice.by_start_.resize(lattice.n_);
  lattice.by_end_.resize(lattice.n_ + 1);
  for (std::size_t pos = 0; pos < pinyin.size(); ++pos) {
    const auto cands = dict.candidates(pinyin[pos]);
    if (cands.empty()) {
      lattice.incomplete_ = true;
      lattice.add({pos, pos + 1, {kUnknownId}, NodeKind::kChar, true, {}});
      continue;
    }
    for (CharId c : cands) {
      lattice.add({pos, pos + 1, {c}, NodeKind::kChar, false, {}});
    }
  }
  return lattice;
}

Lattice build_lattice(const PinyinSequence& pinyin, const CharDict& dict) {
  const auto ids = dict.to_ids(pinyin);
  return build_lattice(std::span<const SyllableId>(ids), dict);
}

Lattice inject_words(Lattice lattice,
                     std::span<const WordLexicon* const> lexicons) {
  const auto& pinyin = lattice.pinyin();
  for (std::size_t li = 0; li < lexicons.size(); ++li) {
    const WordLexicon& lex = *lexicons[li];
    if (lex.size() == 0) continue;
    for (std::size_t start = 0; start < lattice.size(); ++start) {
      for (std::size_t e : lex.match_words(pinyin, start)) {
        const auto& entry = lex.entry(e);
        LatticeNode node;
        node.start = start;
        node.end = start + entry.word.size();
        node.surface = entry.word;
        node.kind = NodeKind::kWord;
        node.source = LexiconRef{li, e};
        lattice.add(std::move(node));
      }
    }
  }
  return lattice;
}

Lattice inject_words(Lattice lattice, const WordLexicon& lexicon) {
  const WordLexicon* one[] = {&lexicon};
  return inject_words(std::move(lattice), one);
}

std::size_t count_paths(const Lattice& lattice) {
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> ways(lattice.size() + 1, 0);
  ways[0] = 1;
  for (std::size_t end = 1; end <= lattice.size(); ++end) {
    for (std::size_t i : lattice.ending_at(end)) {
      const std::size_t from = ways[lattice.node(i).start];
      ways[end] = (kMax - ways[end] < from) ? kMax : ways[end] + from;
    }
  }
  return ways[lattice.size()];
}

const char* to_string(NodeKind kind) {
  return kind == NodeKind::kWord ? "word" : "char";
}

void dump_lattice(std::ostream& out, const Lattice& lattice,
                  const CharDict& dict) {
  for (const auto& node : lattice.nodes()) {
    out << node.start << ' ' << node.end << ' ' << dict.surface(node.surface)
        << ' ' << to_string(node.kind) << '\n';
  }
}

}  // namespace p2c
