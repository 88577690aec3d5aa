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

// Character dictionary (syllable -> candidate characters) and external word
// lexicons.
//
// Dictionary file:
//   # p2c-dict v1
//   wo 我 窝 握
//   men 们 门
// Characters on a line are ordered most frequent first; that order is the
// reading-frequency contract used by text-to-pinyin and by lattice tie-breaks.
//
// Lexicon file:
//   # p2c-lex v1
//   雍和宫<TAB>yong he gong[<TAB>weight]

#ifndef P2C_LEXICON_H_
#define P2C_LEXICON_H_

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace p2c {

using CharId = std::int32_t;
using SyllableId = std::int32_t;

// Reserved ids, shared by the character and the syllable vocabularies.
inline constexpr std::int32_t kPadId = 0;
inline constexpr std::int32_t kUnknownId = 1;
inline constexpr std::int32_t kFirstRegularId = 2;

// Surface used when the unknown character id has to be printed.
inline constexpr char32_t kUnknownChar = U'�';

// Input symbol stream: tone-less syllables such as "wo", "men".
using PinyinSequence = std::vector<std::string>;

class CharDict {
 public:
  static CharDict load(const std::string& path);
  static CharDict parse(std::istream& in);

  // Dense vocabulary sizes, reserved ids included.
  std::size_t char_vocab_size() const { return chars_.size(); }
  std::size_t syllable_vocab_size() const { return syllables_.size(); }

  std::optional<CharId> char_id(char32_t ch) const;
  char32_t char_at(CharId id) const;

  // kUnknownId for syllables not in the dictionary.
  SyllableId syllable_id(std::string_view syllable) const;
  const std::string& syllable_at(SyllableId id) const;
  std::vector<SyllableId> to_ids(const PinyinSequence& pinyin) const;

  // Dictionary-ordered candidates; empty for unknown syllables.
  std::span<const CharId> candidates(SyllableId syllable) const;
  std::span<const CharId> candidates(std::string_view syllable) const {
    return candidates(syllable_id(syllable));
  }

  // Syllables that read `ch`, most frequent reading first.
  std::span<const SyllableId> readings(CharId ch) const;

  bool has_reading(CharId ch, SyllableId syllable) const;

  std::string surface(std::span<const CharId> ids) const;
  // nullopt if some code point is outside the vocabulary.
  std::optional<std::vector<CharId>> encode(std::u32string_view text) const;

  std::uint64_t char_checksum() const { return char_checksum_; }
  std::uint64_t syllable_checksum() const { return syllable_checksum_; }

 private:
  CharDict() = default;
  void finalize();

  std::vector<char32_t> chars_;
  std::unordered_map<char32_t, CharId> char_ids_;
  std::vector<std::string> syllables_;
  std::unordered_map<std::string, SyllableId> syllable_ids_;
  std::vector<std::vector<CharId>> candidates_;    // by syllable id
  std::vector<std::vector<SyllableId>> readings_;  // by char id
  std::uint64_t char_checksum_ = 0;
  std::uint64_t syllable_checksum_ = 0;
};

struct LexiconEntry {
  std::vector<CharId> word;
  std::vector<SyllableId> pinyin;
  // Carried for lexicons that ship frequencies; not used in scoring.
  double weight = 1.0;
};

class WordLexicon {
 public:
  // Entries that are shorter than two characters, have mismatched lengths,
  // use characters or syllables outside `dict`, or carry a reading the
  // dictionary does not list for that character are dropped and counted.
  static WordLexicon load(const std::string& path, const CharDict& dict,
                          std::string name = {});
  static WordLexicon parse(std::istream& in, const CharDict& dict,
                           std::string name = {});
  static WordLexicon from_entries(std::vector<LexiconEntry> entries,
                                  std::string name = {});

  const std::string& name() const { return name_; }
  std::span<const LexiconEntry> entries() const { return entries_; }
  const LexiconEntry& entry(std::size_t index) const { return entries_[index]; }
  std::size_t size() const { return entries_.size(); }
  std::size_t rejected() const { return rejected_; }

  // Indices of entries whose syllables equal pinyin[start, start + k) for
  // some k >= 2, longest first, file order within a length.
  std::vector<std::size_t> match_words(std::span<const SyllableId> pinyin,
                                       std::size_t start) const;

  // First entry spelled exactly `word`, if any.
  std::optional<std::size_t> find_word(std::span<const CharId> word) const;
  std::size_t max_word_length() const { return max_word_length_; }

 private:
  WordLexicon() = default;
  void add(LexiconEntry entry);

  struct TrieNode {
    std::map<SyllableId, std::int32_t> children;
    std::vector<std::size_t> entries;
  };

  std::string name_;
  std::vector<LexiconEntry> entries_;
  std::vector<TrieNode> trie_{TrieNode{}};
  std::map<std::vector<CharId>, std::size_t> by_word_;
  std::size_t max_word_length_ = 0;
  std::size_t rejected_ = 0;
};

}  // namespace p2c

#endif  // P2C_LEXICON_H_
