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

#include "p2c/corpus.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "p2c/error.h"
#include "p2c/utf8.h"

namespace p2c {
namespace {

struct Span {
  std::size_t begin;
  std::size_t end;
};

std::vector<Span> segment_spans(std::u32string_view text,
                                const std::set<char32_t>& punctuation) {
  std::vector<Span> spans;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || punctuation.count(text[i]) != 0) {
      if (i > begin) spans.push_back({begin, i});
      begin = i + 1;
    }
  }
  return spans;
}

std::vector<Span> run_spans(std::u32string_view text, const CharDict& dict) {
  std::vector<Span> spans;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    const bool in_vocab = i < text.size() && dict.char_id(text[i]).has_value();
    if (!in_vocab) {
      if (i > begin) spans.push_back({begin, i});
      begin = i + 1;
    }
  }
  return spans;
}

}  // namespace

const std::set<char32_t>& default_punctuation() {
  static const std::set<char32_t> kSet = {
      U'，', U'。', U'？', U'！', U'；', U'：', U'、', U'､', U'．',
      U',',  U'.',  U'?',  U'!',  U';',  U':'};
  return kSet;
}

std::vector<std::u32string> segment_sentences(
    std::u32string_view text, const std::set<char32_t>& punctuation) {
  if (punctuation.empty()) throw ConfigError("punctuation set is empty");
  std::vector<std::u32string> out;
  for (const auto& s : segment_spans(text, punctuation)) {
    out.emplace_back(text.substr(s.begin, s.end - s.begin));
  }
  return out;
}

std::vector<std::u32string> segment_sentences(
    const RawDocument& doc, const std::set<char32_t>& punctuation) {
  return segment_sentences(utf8::decode(doc.text), punctuation);
}

std::vector<std::vector<CharId>> normalize(std::u32string_view sentence,
                                           const CharDict& dict) {
  std::vector<std::vector<CharId>> out;
  for (const auto& s : run_spans(sentence, dict)) {
    out.push_back(*dict.encode(sentence.substr(s.begin, s.end - s.begin)));
  }
  return out;
}

std::vector<std::vector<CharId>> chunk(const std::vector<CharId>& chars,
                                       std::size_t max_len) {
  if (max_len == 0) throw ConfigError("max_len must be at least 1");
  std::vector<std::vector<CharId>> out;
  for (std::size_t i = 0; i < chars.size(); i += max_len) {
    const std::size_t end = std::min(chars.size(), i + max_len);
    out.emplace_back(chars.begin() + static_cast<std::ptrdiff_t>(i),
                     chars.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

PinyinSequence text_to_pinyin(std::span<const CharId> chars,
                              const WordLexicon& words, const CharDict& dict) {
  PinyinSequence out;
  out.reserve(chars.size());
  std::size_t i = 0;
  while (i < chars.size()) {
    const std::size_t longest =
        std::min(words.max_word_length(), chars.size() - i);
    bool matched = false;
    for (std::size_t len = longest; len >= 2; --len) {
      auto hit = words.find_word(chars.subspan(i, len));
      if (!hit) continue;
      for (SyllableId s : words.entry(*hit).pinyin) {
        out.push_back(dict.syllable_at(s));
      }
      i += len;
      matched = true;
      break;
    }
    if (matched) continue;
    auto readings = dict.readings(chars[i]);
    if (readings.empty()) {
      throw CharNotInDictionary(dict.char_at(chars[i]), i);
    }
    out.push_back(dict.syllable_at(readings.front()));
    ++i;
  }
  return out;
}

std::vector<ParallelSample> build_parallel_corpus(
    std::vector<RawDocument> docs, const CharDict& dict,
    const WordLexicon& words, const CorpusConfig& config, CorpusStats& stats) {
  if (config.max_len == 0) throw ConfigError("max_len must be at least 1");
  if (config.punctuation.empty()) throw ConfigError("punctuation set is empty");
  std::stable_sort(docs.begin(), docs.end(),
                   [](const RawDocument& a, const RawDocument& b) {
                     return a.id < b.id;
                   });
  stats = CorpusStats{};
  std::vector<ParallelSample> samples;
  for (const auto& doc : docs) {
    ++stats.articles;
    const std::u32string text = utf8::decode(doc.text);
    for (const auto& sentence : segment_spans(text, config.punctuation)) {
      ++stats.sentences;
      std::u32string_view view(text);
      view = view.substr(sentence.begin, sentence.end - sentence.begin);
      for (const auto& run : run_spans(view, dict)) {
        const auto ids =
            *dict.encode(view.substr(run.begin, run.end - run.begin));
        std::size_t offset = sentence.begin + run.begin;
        for (auto& piece : chunk(ids, config.max_len)) {
          const std::size_t len = piece.size();
          try {
            ParallelSample sample;
            sample.pinyin = text_to_pinyin(piece, words, dict);
            sample.chars = std::move(piece);
            sample.doc_id = doc.id;
            sample.offset = offset;
            ++stats.samples;
            stats.chars += len;
            samples.push_back(std::move(sample));
          } catch (const CharNotInDictionary&) {
            ++stats.skipped;
          }
          offset += len;
        }
      }
    }
  }
  return samples;
}

void write_corpus(std::ostream& out, const std::vector<ParallelSample>& samples,
                  const CharDict& dict) {
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < s.pinyin.size(); ++i) {
      if (i) out << ' ';
      out << s.pinyin[i];
    }
    out << '\t' << dict.surface(s.chars) << '\n';
  }
}

void write_stats(std::ostream& out, const CorpusStats& stats) {
  out << "articles=" << stats.articles << '\n'
      << "sentences=" << stats.sentences << '\n'
      << "samples=" << stats.samples << '\n'
      << "chars=" << stats.chars << '\n'
      << "skipped=" << stats.skipped << '\n';
}

std::vector<RawDocument> read_documents(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError(dir + " is not a directory");
  std::vector<RawDocument> docs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) throw IoError("cannot open " + entry.path().string());
    std::ostringstream buf;
    buf << in.rdbuf();
    docs.push_back({entry.path().filename().string(), buf.str()});
  }
  std::sort(docs.begin(), docs.end(),
            [](const RawDocument& a, const RawDocument& b) {
              return a.id < b.id;
            });
  return docs;
}

CorpusLine parse_corpus_line(std::string_view line, std::size_t line_no) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos) {
    throw ParseError("corpus line has no TAB separator", line_no);
  }
  CorpusLine out;
  out.pinyin = utf8::split_ws(line.substr(0, tab));
  out.chars = utf8::decode(utf8::trim(line.substr(tab + 1)));
  return out;
}

std::vector<CorpusLine> read_corpus(std::istream& in) {
  std::vector<CorpusLine> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (utf8::trim(line).empty()) continue;
    out.push_back(parse_corpus_line(line, line_no));
  }
  return out;
}

std::vector<CorpusLine> read_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_corpus(in);
}

}  // namespace p2c
