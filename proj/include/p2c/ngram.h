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

// Character bigram model with interpolated smoothing:
//
//   P(next | prev) = lambda * count(prev, next) / count(prev, *)
//                  + (1 - lambda) * (count(next) + 1) / (total + |V|)
//
// V is the character vocabulary (reserved ids included) plus end-of-sentence.
// Unigram counts are taken over predicted tokens, so every sample "c1..cn"
// contributes n character tokens and one eos token; bos is a context only.
// A context never seen backs off to the unigram term alone (weight 1).
//
// File layout (little endian):
//   "NGRM1"  u64 vocab checksum  f64 lambda
//   u64 n, then n x (u32 prev, u32 next, u64 count)   sorted by (prev, next)
//   u64 m, then m x (u32 id, u64 count)               sorted by id

#ifndef P2C_NGRAM_H_
#define P2C_NGRAM_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "p2c/lexicon.h"

namespace p2c {

class NgramModel {
 public:
  static constexpr double kDefaultLambda = 0.9;

  NgramModel(std::size_t vocab_size, std::uint64_t vocab_checksum,
             double lambda = kDefaultLambda);

  CharId bos() const { return static_cast<CharId>(vocab_size_); }
  CharId eos() const { return static_cast<CharId>(vocab_size_ + 1); }
  std::size_t vocab_size() const { return vocab_size_; }
  // |V| in the smoothing denominator: characters plus eos.
  std::size_t smoothing_vocab() const { return vocab_size_ + 1; }

  double lambda() const { return lambda_; }
  void set_lambda(double lambda);
  std::uint64_t vocab_checksum() const { return vocab_checksum_; }

  // Counts bos c1 ... cn eos. Throws VocabMismatch for out-of-range ids.
  void add_sentence(std::span<const CharId> chars);

  std::uint64_t unigram(CharId id) const;
  std::uint64_t bigram(CharId prev, CharId next) const;
  std::uint64_t context_total(CharId prev) const;
  std::uint64_t total_tokens() const { return total_tokens_; }

  // In (0, 1]. `prev` may be bos, `next` may be eos.
  double prob(CharId prev, CharId next) const;
  double log_prob(CharId prev, CharId next) const;

  void save(std::ostream& out) const;
  void save(const std::string& path) const;
  // Throws ChecksumMismatch when the file was built for another dictionary,
  // FormatError for anything structurally wrong.
  static NgramModel load(std::istream& in, const CharDict& dict);
  static NgramModel load(const std::string& path, const CharDict& dict);

  bool operator==(const NgramModel&) const = default;

 private:
  std::size_t vocab_size_;
  std::uint64_t vocab_checksum_;
  double lambda_;
  std::map<std::pair<CharId, CharId>, std::uint64_t> bigrams_;
  std::map<CharId, std::uint64_t> unigrams_;
  std::map<CharId, std::uint64_t> context_totals_;
  std::uint64_t total_tokens_ = 0;
};

// The character side of each corpus line; the pinyin side is ignored.
// Throws VocabMismatch for characters outside the dictionary.
NgramModel train_bigram(std::istream& corpus, const CharDict& dict,
                        double lambda = NgramModel::kDefaultLambda);
NgramModel train_bigram(const std::string& corpus_path, const CharDict& dict,
                        double lambda = NgramModel::kDefaultLambda);

}  // namespace p2c

#endif  // P2C_NGRAM_H_
