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

// Raw text -> pinyin/character parallel corpus.
//
// Corpus file: one sample per line, space separated syllables, a TAB, then
// the characters with no separators:
//   wo men qu yong he gong<TAB>我们去雍和宫

#ifndef P2C_CORPUS_H_
#define P2C_CORPUS_H_

#include <cstddef>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "p2c/lexicon.h"

namespace p2c {

struct RawDocument {
  std::string id;
  std::string text;
};

struct ParallelSample {
  PinyinSequence pinyin;
  std::vector<CharId> chars;
  std::string doc_id;
  std::size_t offset = 0;  // code point offset of chars[0] in the document
};

// Full- and half-width comma, period, question mark, exclamation mark,
// semicolon and colon, plus the enumeration comma.
const std::set<char32_t>& default_punctuation();

// Empty segments are dropped.
std::vector<std::u32string> segment_sentences(
    std::u32string_view text,
    const std::set<char32_t>& punctuation = default_punctuation());
std::vector<std::u32string> segment_sentences(
    const RawDocument& doc,
    const std::set<char32_t>& punctuation = default_punctuation());

// Maximal runs of in-vocabulary characters. Anything else separates runs.
std::vector<std::vector<CharId>> normalize(std::u32string_view sentence,
                                           const CharDict& dict);

// Greedy, no overlap. Throws ConfigError for max_len == 0.
std::vector<std::vector<CharId>> chunk(const std::vector<CharId>& chars,
                                       std::size_t max_len);

// Greedy longest-match against `words`; words use their recorded reading,
// everything else takes the first reading in the dictionary.
// Throws CharNotInDictionary.
PinyinSequence text_to_pinyin(std::span<const CharId> chars,
                              const WordLexicon& words, const CharDict& dict);

struct CorpusConfig {
  std::set<char32_t> punctuation = default_punctuation();
  std::size_t max_len = 16;
};

struct CorpusStats {
  std::size_t articles = 0;
  std::size_t sentences = 0;
  std::size_t samples = 0;
  std::size_t chars = 0;
  std::size_t skipped = 0;

  bool operator==(const CorpusStats&) const = default;
};

// Documents are processed in id order regardless of input order.
std::vector<ParallelSample> build_parallel_corpus(
    std::vector<RawDocument> docs, const CharDict& dict,
    const WordLexicon& words, const CorpusConfig& config, CorpusStats& stats);

void write_corpus(std::ostream& out, const std::vector<ParallelSample>& samples,
                  const CharDict& dict);
void write_stats(std::ostream& out, const CorpusStats& stats);

// All regular files directly under `dir`, read as UTF-8, id = file name.
std::vector<RawDocument> read_documents(const std::string& dir);

// One parsed corpus line. Characters are kept as code points so that
// references outside the vocabulary can still be scored.
struct CorpusLine {
  PinyinSequence pinyin;
  std::u32string chars;
};

// Throws ParseError for lines without the TAB separator.
CorpusLine parse_corpus_line(std::string_view line, std::size_t line_no);
std::vector<CorpusLine> read_corpus(std::istream& in);
std::vector<CorpusLine> read_corpus(const std::string& path);

}  // namespace p2c

#endif  // P2C_CORPUS_H_
