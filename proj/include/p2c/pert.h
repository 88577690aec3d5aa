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

// Pinyin encoder: a bidirectional transformer encoder whose only input is the
// syllable sequence (token + learned absolute position embeddings, no segment
// embedding), followed by an untied classifier over the character vocabulary.
//
//   x = LN(tok[y_i] + pos[i])
//   repeat L times:
//     x = LN(x + MultiHeadSelfAttention(x))      no causal mask
//     x = LN(x + W2 gelu(W1 x + b1) + b2)
//   P(c | y, i) = softmax(x_i Wc + bc)
//
// Linear maps are stored [in, out] row-major and applied as x W + b.
//
// PERTW file (little endian):
//   "PERTW1"  u32 manifest_bytes  manifest (UTF-8 JSON)  tensor data (f32)
// The manifest carries "config", "pinyin_vocab_checksum",
// "char_vocab_checksum", an optional "data_checksum" (FNV-1a 64 over the
// data section) and "tensors": [{"name", "shape", "offset"}], offsets in
// bytes from the start of the data section. See tensor_names() for the
// canonical names.

#ifndef P2C_PERT_H_
#define P2C_PERT_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "p2c/emission.h"
#include "p2c/lexicon.h"

namespace p2c {

struct PertConfig {
  std::size_t num_layers = 2;
  std::size_t hidden_size = 128;
  std::size_t num_heads = 2;
  std::size_t ff_size = 512;
  std::size_t pinyin_vocab_size = 0;
  std::size_t char_vocab_size = 0;
  std::size_t max_len = 16;
  float layernorm_epsilon = 1e-12f;

  // tiny, mini, small, medium, base. Heads follow hidden/64; ff is 4H.
  static PertConfig named(std::string_view scale, std::size_t pinyin_vocab,
                          std::size_t char_vocab);
  // Throws ConfigError.
  void validate() const;
  std::size_t head_dim() const { return hidden_size / num_heads; }

  bool operator==(const PertConfig&) const = default;
};

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s);
  std::size_t numel() const;
  bool operator==(const Tensor&) const = default;
};

struct PertLayerWeights {
  Tensor query_w, query_b, key_w, key_b, value_w, value_b, output_w, output_b;
  Tensor attention_ln_gamma, attention_ln_beta;
  Tensor ffn_in_w, ffn_in_b, ffn_out_w, ffn_out_b;
  Tensor ffn_ln_gamma, ffn_ln_beta;
  bool operator==(const PertLayerWeights&) const = default;
};

struct PertWeights {
  Tensor token_embedding;     // [|Y|, H]
  Tensor position_embedding;  // [max_len, H]
  Tensor embedding_ln_gamma, embedding_ln_beta;
  std::vector<PertLayerWeights> layers;
  Tensor classifier_w;  // [H, |C|]
  Tensor classifier_b;

  // Zero weights, unit layernorm gains, shapes from `config`.
  static PertWeights zeros(const PertConfig& config);
  bool operator==(const PertWeights&) const = default;
};

// Canonical tensor order and expected shapes for a config.
std::vector<std::pair<std::string, std::vector<std::size_t>>> tensor_names(
    const PertConfig& config);
std::vector<Tensor*> tensor_slots(PertWeights& weights);
std::vector<const Tensor*> tensor_slots(const PertWeights& weights);

// Filled by forward() when requested: attention[layer][head] is n x n,
// row i holding the weights position i puts on every position.
struct ForwardTrace {
  std::vector<std::vector<std::vector<float>>> attention;
};

class PertModel final : public EmissionModel {
 public:
  PertModel(PertConfig config, PertWeights weights);

  // Throws FormatError, ShapeMismatch.
  static PertModel load(const std::string& path);
  static PertModel load(std::istream& in);
  void save(const std::string& path) const;
  void save(std::ostream& out) const;

  // Throws ChecksumMismatch if this model was exported for other vocabularies.
  void verify_vocab(const CharDict& dict) const;
  void set_vocab_checksums(std::uint64_t pinyin, std::uint64_t chars) {
    pinyin_checksum_ = pinyin;
    char_checksum_ = chars;
  }
  std::uint64_t pinyin_checksum() const { return pinyin_checksum_; }
  std::uint64_t char_checksum() const { return char_checksum_; }

  const PertConfig& config() const { return config_; }
  const PertWeights& weights() const { return weights_; }

  // Throws SequenceTooLong, InvalidTokenId, EmptyInput.
  EmissionMatrix forward(std::span<const SyllableId> pinyin,
                         ForwardTrace* trace = nullptr) const;

  EmissionMatrix emission(std::span<const SyllableId> pinyin) const override {
    return forward(pinyin);
  }
  std::size_t char_vocab_size() const override {
    return config_.char_vocab_size;
  }
  std::size_t max_len() const override { return config_.max_len; }
  std::string describe() const override;

 private:
  PertConfig config_;
  PertWeights weights_;
  std::uint64_t pinyin_checksum_ = 0;
  std::uint64_t char_checksum_ = 0;
};

}  // namespace p2c

#endif  // P2C_PERT_H_
