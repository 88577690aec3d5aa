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

#include "p2c/lexicon.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "p2c/error.h"
#include "p2c/utf8.h"

namespace p2c {
namespace {

constexpr std::string_view kDictHeader = "# p2c-dict";
constexpr std::string_view kLexHeader = "# p2c-lex";

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

bool valid_syllable(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return c >= 'a' && c <= 'z'; });
}

// Returns false for blank and comment lines. Checks the version header when
// it is the first non-blank line.
bool content_line(std::string_view raw, std::size_t line_no, bool& seen_any,
                  std::string_view header) {
  std::string_view line = utf8::trim(raw);
  if (line.empty()) return false;
  const bool first = !seen_any;
  seen_any = true;
  if (line.front() == '#') {
    if (first) {
      if (line.substr(0, header.size()) != header) {
        throw ParseError("missing '" + std::string(header) + " v1' header",
                         line_no);
      }
      auto version = utf8::trim(line.substr(header.size()));
      if (version != "v1") {
        throw FormatError("unsupported version '" + std::string(version) +
                          "'");
      }
    }
    return false;
  }
  if (first) {
    throw ParseError("missing '" + std::string(header) + " v1' header",
                     line_no);
  }
  return true;
}

}  // namespace

CharDict CharDict::load(const std::string& path) {
  auto in = open_or_throw(path);
  return parse(in);
}

CharDict CharDict::parse(std::istream& in) {
  CharDict dict;
  dict.chars_ = {U'\0', kUnknownChar};
  dict.syllables_ = {"<pad>", "<unk>"};
  dict.candidates_.resize(2);

  std::string raw;
  std::size_t line_no = 0;
  bool seen_any = false;
  std::vector<std::pair<std::string, std::vector<char32_t>>> rows;
  while (std::getline(in, raw)) {
    ++line_no;
    if (line_no == 1 && raw.size() >= 3 && raw.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      raw.erase(0, 3);
    }
    if (!content_line(raw, line_no, seen_any, kDictHeader)) continue;
    auto fields = utf8::split_ws(raw);
    if (fields.size() < 2) {
      throw ParseError("syllable '" + fields[0] + "' lists no characters",
                       line_no);
    }
    if (!valid_syllable(fields[0])) {
      throw ParseError("invalid syllable '" + fields[0] + "'", line_no);
    }
    if (dict.syllable_ids_.count(fields[0]) != 0) {
      throw DuplicateSyllable("syllable '" + fields[0] + "' repeated at line " +
                              std::to_string(line_no));
    }
    const auto syllable = static_cast<SyllableId>(dict.syllables_.size());
    dict.syllables_.push_back(fields[0]);
    dict.syllable_ids_.emplace(fields[0], syllable);
    std::vector<CharId> cands;
    for (std::size_t f = 1; f < fields.size(); ++f) {
      auto cps = utf8::decode(fields[f]);
      if (cps.size() != 1 || cps[0] == kUnknownChar) {
        throw ParseError("'" + fields[f] + "' is not a single character",
                         line_no);
      }
      auto [it, inserted] = dict.char_ids_.emplace(
          cps[0], static_cast<CharId>(dict.chars_.size()));
      if (inserted) dict.chars_.push_back(cps[0]);
      if (std::find(cands.begin(), cands.end(), it->second) != cands.end()) {
        throw ParseError("character '" + fields[f] + "' repeated", line_no);
      }
      cands.push_back(it->second);
    }
    dict.candidates_.push_back(std::move(cands));
  }
  if (dict.syllables_.size() == kFirstRegularId) {
    throw EmptyDictionary("character dictionary has no entries");
  }
  dict.finalize();
  return dict;
}

void CharDict::finalize() {
  readings_.assign(chars_.size(), {});
  for (std::size_t s = kFirstRegularId; s < candidates_.size(); ++s) {
    for (CharId c : candidates_[s]) {
      readings_[c].push_back(static_cast<SyllableId>(s));
    }
  }
  Fnv1a64 ch;
  for (std::size_t i = kFirstRegularId; i < chars_.size(); ++i) {
    ch.update(utf8::encode(chars_[i]));
    ch.update("\n");
  }
  char_checksum_ = ch.digest();
  Fnv1a64 sy;
  for (std::size_t i = kFirstRegularId; i < syllables_.size(); ++i) {
    sy.update(syllables_[i]);
    sy.update("\n");
  }
  syllable_checksum_ = sy.digest();
}

std::optional<CharId> CharDict::char_id(char32_t ch) const {
  auto it = char_ids_.find(ch);
  if (it == char_ids_.end()) return std::nullopt;
  return it->second;
}

char32_t CharDict::char_at(CharId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= chars_.size()) {
    return kUnknownChar;
  }
  return chars_[id];
}

SyllableId CharDict::syllable_id(std::string_view syllable) const {
  auto it = syllable_ids_.find(std::string(syllable));
  return it == syllable_ids_.end() ? kUnknownId : it->second;
}

const std::string& CharDict::syllable_at(SyllableId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= syllables_.size()) {
    return syllables_[kUnknownId];
  }
  return syllables_[id];
}

std::vector<SyllableId> CharDict::to_ids(const PinyinSequence& pinyin) const {
  std::vector<SyllableId> ids;
  ids.reserve(pinyin.size());
  for (const auto& s : pinyin) ids.push_back(syllable_id(s));
  return ids;
}

std::span<const CharId> CharDict::candidates(SyllableId syllable) const {
  if (syllable < kFirstRegularId ||
      static_cast<std::size_t>(syllable) >= candidates_.size()) {
    return {};
  }
  return candidates_[syllable];
}

std::span<const SyllableId> CharDict::readings(CharId ch) const {
  if (ch < 0 || static_cast<std::size_t>(ch) >= readings_.size()) return {};
  return readings_[ch];
}

bool CharDict::has_reading(CharId ch, SyllableId syllable) const {
  auto r = readings(ch);
  return std::find(r.begin(), r.end(), syllable) != r.end();
}

std::string CharDict::surface(std::span<const CharId> ids) const {
  std::string out;
  for (CharId id : ids) out += utf8::encode(char_at(id));
  return out;
}

std::optional<std::vector<CharId>> CharDict::encode(
    std::u32string_view text) const {
  std::vector<CharId> ids;
  ids.reserve(text.size());
  for (char32_t cp : text) {
    auto id = char_id(cp);
    if (!id) return std::nullopt;
    ids.push_back(*id);
  }
  return ids;
}

// ---------------------------------------------------------------------------

WordLexicon WordLexicon::load(const std::string& path, const CharDict& dict,
                              std::string name) {
  auto in = open_or_throw(path);
  if (name.empty()) {
    auto slash = path.find_last_of('/');
    name = path.substr(slash == std::string::npos ? 0 : slash + 1);
    auto dot = name.find_last_of('.');
    if (dot != std::string::npos && dot > 0) name.resize(dot);
  }
  return parse(in, dict, std::move(name));
}

WordLexicon WordLexicon::parse(std::istream& in, const CharDict& dict,
                               std::string name) {
  WordLexicon lex;
  lex.name_ = std::move(name);
  std::string raw;
  std::size_t line_no = 0;
  bool seen_any = false;
  while (std::getline(in, raw)) {
    ++line_no;
    if (line_no == 1 && raw.size() >= 3 && raw.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      raw.erase(0, 3);
    }
    if (!content_line(raw, line_no, seen_any, kLexHeader)) continue;
    std::string_view line = utf8::trim(raw);
    std::vector<std::string_view> cols;
    std::size_t pos = 0;
    while (true) {
      auto tab = line.find('\t', pos);
      cols.push_back(utf8::trim(line.substr(pos, tab - pos)));
      if (tab == std::string_view::npos) break;
      pos = tab + 1;
    }
    if (cols.size() < 2 || cols.size() > 3 || cols[0].empty()) {
      throw ParseError("expected 'word<TAB>syllables[<TAB>weight]'", line_no);
    }
    LexiconEntry entry;
    if (cols.size() == 3) {
      double w = 0;
      auto [ptr, ec] = std::from_chars(cols[2].data(),
                                       cols[2].data() + cols[2].size(), w);
      if (ec != std::errc() || ptr != cols[2].data() + cols[2].size() ||
          !(w >= 0) || !std::isfinite(w)) {
        throw ParseError("weight must be a non-negative number", line_no);
      }
      entry.weight = w;
    }
    const auto chars = utf8::decode(cols[0]);
    const auto syllables = utf8::split_ws(cols[1]);
    bool ok = chars.size() >= 2 && chars.size() == syllables.size();
    for (std::size_t i = 0; ok && i < chars.size(); ++i) {
      auto c = dict.char_id(chars[i]);
      auto s = dict.syllable_id(syllables[i]);
      if (!c || s == kUnknownId || !dict.has_reading(*c, s)) {
        ok = false;
        break;
      }
      entry.word.push_back(*c);
      entry.pinyin.push_back(s);
    }
    if (!ok) {
      ++lex.rejected_;
      continue;
    }
    lex.add(std::move(entry));
  }
  return lex;
}

WordLexicon WordLexicon::from_entries(std::vector<LexiconEntry> entries,
                                      std::string name) {
  WordLexicon lex;
  lex.name_ = std::move(name);
  for (auto& e : entries) {
    if (e.word.size() < 2 || e.word.size() != e.pinyin.size()) {
      ++lex.rejected_;
      continue;
    }
    lex.add(std::move(e));
  }
  return lex;
}

void WordLexicon::add(LexiconEntry entry) {
  const std::size_t index = entries_.size();
  std::int32_t node = 0;
  for (SyllableId s : entry.pinyin) {
    auto it = trie_[node].children.find(s);
    if (it == trie_[node].children.end()) {
      const auto child = static_cast<std::int32_t>(trie_.size());
      trie_[node].children.emplace(s, child);
      trie_.emplace_back();
      node = child;
    } else {
      node = it->second;
    }
  }
  trie_[node].entries.push_back(index);
  by_word_.emplace(entry.word, index);
  max_word_length_ = std::max(max_word_length_, entry.word.size());
  entries_.push_back(std::move(entry));
}

std::vector<std::size_t> WordLexicon::match_words(
    std::span<const SyllableId> pinyin, std::size_t start) const {
  std::vector<std::vector<std::size_t>> by_length;
  std::int32_t node = 0;
  for (std::size_t i = start; i < pinyin.size(); ++i) {
    auto it = trie_[node].children.find(pinyin[i]);
    if (it == trie_[node].children.end()) break;
    node = it->second;
    if (i - start + 1 >= 2 && !trie_[node].entries.empty()) {
      by_length.push_back(trie_[node].entries);
    }
  }
  std::vector<std::size_t> out;
  for (auto it = by_length.rbegin(); it != by_length.rend(); ++it) {
    out.insert(out.end(), it->begin(), it->end());
  }
  return out;
}

std::optional<std::size_t> WordLexicon::find_word(
    std::span<const CharId> word) const {
  auto it = by_word_.find(std::vector<CharId>(word.begin(), word.end()));
  if (it == by_word_.end()) return std::nullopt;
  return it->second;
}

}  // namespace p2c
