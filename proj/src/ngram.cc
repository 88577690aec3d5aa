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

#include "p2c/ngram.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "p2c/corpus.h"
#include "p2c/error.h"
#include "p2c/utf8.h"

namespace p2c {
namespace {

constexpr char kMagic[5] = {'N', 'G', 'R', 'M', '1'};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(buf, buf + sizeof(T));
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw FormatError("n-gram file truncated");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(buf, buf + sizeof(T));
  }
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace

NgramModel::NgramModel(std::size_t vocab_size, std::uint64_t vocab_checksum,
                       double lambda)
    : vocab_size_(vocab_size), vocab_checksum_(vocab_checksum), lambda_(0) {
  set_lambda(lambda);
}

void NgramModel::set_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ConfigError("n-gram lambda must lie in [0, 1]");
  }
  lambda_ = lambda;
}

void NgramModel::add_sentence(std::span<const CharId> chars) {
  for (CharId c : chars) {
    if (c < 0 || static_cast<std::size_t>(c) >= vocab_size_) {
      throw VocabMismatch("character id " + std::to_string(c) +
                          " outside the vocabulary");
    }
  }
  CharId prev = bos();
  const auto count = [&](CharId next) {
    ++bigrams_[{prev, next}];
    ++context_totals_[prev];
    ++unigrams_[next];
    ++total_tokens_;
    prev = next;
  };
  for (CharId c : chars) count(c);
  count(eos());
}

std::uint64_t NgramModel::unigram(CharId id) const {
  auto it = unigrams_.find(id);
  return it == unigrams_.end() ? 0 : it->second;
}

std::uint64_t NgramModel::bigram(CharId prev, CharId next) const {
  auto it = bigrams_.find({prev, next});
  return it == bigrams_.end() ? 0 : it->second;
}

std::uint64_t NgramModel::context_total(CharId prev) const {
  auto it = context_totals_.find(prev);
  return it == context_totals_.end() ? 0 : it->second;
}

double NgramModel::prob(CharId prev, CharId next) const {
  const double unigram_term =
      (static_cast<double>(unigram(next)) + 1.0) /
      (static_cast<double>(total_tokens_) +
       static_cast<double>(smoothing_vocab()));
  const std::uint64_t context = context_total(prev);
  // An unseen context backs off entirely to the smoothed unigram, which keeps
  // every conditional distribution normalized.
  if (context == 0) return unigram_term;
  const double bigram_term = static_cast<double>(bigram(prev, next)) /
                             static_cast<double>(context);
  return lambda_ * bigram_term + (1.0 - lambda_) * unigram_term;
}

double NgramModel::log_prob(CharId prev, CharId next) const {
  return std::log(prob(prev, next));
}

void NgramModel::save(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(out, vocab_checksum_);
  put<double>(out, lambda_);
  put<std::uint64_t>(out, bigrams_.size());
  for (const auto& [key, count] : bigrams_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(key.first));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(key.second));
    put<std::uint64_t>(out, count);
  }
  put<std::uint64_t>(out, unigrams_.size());
  for (const auto& [id, count] : unigrams_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(id));
    put<std::uint64_t>(out, count);
  }
  if (!out) throw IoError("failed writing n-gram model");
}

void NgramModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  save(out);
}

NgramModel NgramModel::load(std::istream& in, const CharDict& dict) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not an n-gram file (bad magic)");
  }
  const auto checksum = get<std::uint64_t>(in);
  if (checksum != dict.char_checksum()) {
    throw ChecksumMismatch("n-gram vocabulary checksum " + to_hex(checksum) +
                           " does not match dictionary " +
                           to_hex(dict.char_checksum()));
  }
  const double lambda = get<double>(in);
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw FormatError("n-gram lambda out of range");
  }
  NgramModel model(dict.char_vocab_size(), checksum, lambda);
  const auto max_id = static_cast<std::uint32_t>(model.eos());
  const auto n = get<std::uint64_t>(in);
  std::pair<CharId, CharId> last{-1, -1};
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto prev = get<std::uint32_t>(in);
    const auto next = get<std::uint32_t>(in);
    const auto count = get<std::uint64_t>(in);
    if (prev > max_id || next > max_id || count == 0) {
      throw FormatError("n-gram bigram entry out of range");
    }
    std::pair<CharId, CharId> key{static_cast<CharId>(prev),
                                  static_cast<CharId>(next)};
    if (i > 0 && !(last < key)) throw FormatError("bigram entries not sorted");
    last = key;
    model.bigrams_.emplace(key, count);
    model.context_totals_[key.first] += count;
  }
  const auto m = get<std::uint64_t>(in);
  CharId last_id = -1;
  for (std::uint64_t i = 0; i < m; ++i) {
    const auto id = get<std::uint32_t>(in);
    const auto count = get<std::uint64_t>(in);
    if (id > max_id || count == 0) {
      throw FormatError("n-gram unigram entry out of range");
    }
    if (static_cast<CharId>(id) <= last_id) {
      throw FormatError("unigram entries not sorted");
    }
    last_id = static_cast<CharId>(id);
    model.unigrams_.emplace(static_cast<CharId>(id), count);
    model.total_tokens_ += count;
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after n-gram tables");
  }
  return model;
}

NgramModel NgramModel::load(const std::string& path, const CharDict& dict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return load(in, dict);
}

NgramModel train_bigram(std::istream& corpus, const CharDict& dict,
                        double lambda) {
  NgramModel model(dict.char_vocab_size(), dict.char_checksum(), lambda);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(corpus, line)) {
    ++line_no;
    if (utf8::trim(line).empty()) continue;
    const auto parsed = parse_corpus_line(line, line_no);
    auto ids = dict.encode(parsed.chars);
    if (!ids) {
      throw VocabMismatch("corpus line " + std::to_string(line_no) +
                          " has characters outside the dictionary");
    }
    model.add_sentence(*ids);
  }
  return model;
}

NgramModel train_bigram(const std::string& corpus_path, const CharDict& dict,
                        double lambda) {
  std::ifstream in(corpus_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + corpus_path);
  return train_bigram(in, dict, lambda);
}

}  // namespace p2c
