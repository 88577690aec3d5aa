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

#include "p2c/pert.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "p2c/error.h"
#include "p2c/utf8.h"

namespace p2c {
namespace {

using json = nlohmann::json;

constexpr char kMagic[6] = {'P', 'E', 'R', 'T', 'W', '1'};
// Manifests beyond this are certainly corrupt.
constexpr std::uint32_t kMaxManifestBytes = 64u << 20;

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

// Row-major matrix view over a flat vector.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> v;

  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0f) {}
  float* row(std::size_t i) { return v.data() + i * cols; }
  const float* row(std::size_t i) const { return v.data() + i * cols; }
};

// out = x W + b, W stored [in, out].
Mat linear(const Mat& x, const Tensor& w, const Tensor& b) {
  const std::size_t in = w.shape[0];
  const std::size_t out = w.shape[1];
  Mat y(x.rows, out);
  for (std::size_t i = 0; i < x.rows; ++i) {
    float* yr = y.row(i);
    std::copy(b.data.begin(), b.data.end(), yr);
    const float* xr = x.row(i);
    for (std::size_t k = 0; k < in; ++k) {
      const float xk = xr[k];
      const float* wr = w.data.data() + k * out;
      for (std::size_t j = 0; j < out; ++j) yr[j] += xk * wr[j];
    }
  }
  return y;
}

void layernorm(Mat& x, const Tensor& gamma, const Tensor& beta, float eps) {
  for (std::size_t i = 0; i < x.rows; ++i) {
    float* r = x.row(i);
    float mean = 0.0f;
    for (std::size_t j = 0; j < x.cols; ++j) mean += r[j];
    mean /= static_cast<float>(x.cols);
    float var = 0.0f;
    for (std::size_t j = 0; j < x.cols; ++j) {
      const float d = r[j] - mean;
      var += d * d;
    }
    var /= static_cast<float>(x.cols);
    const float inv = 1.0f / std::sqrt(var + eps);
    for (std::size_t j = 0; j < x.cols; ++j) {
      r[j] = (r[j] - mean) * inv * gamma.data[j] + beta.data[j];
    }
  }
}

float gelu(float x) {
  return 0.5f * x * (1.0f + std::erf(x * 0.70710678118654752f));
}

void add_inplace(Mat& x, const Mat& y) {
  for (std::size_t i = 0; i < x.v.size(); ++i) x.v[i] += y.v[i];
}

Mat self_attention(const Mat& x, const PertLayerWeights& lw,
                   const PertConfig& cfg,
                   std::vector<std::vector<float>>* trace) {
  const Mat q = linear(x, lw.query_w, lw.query_b);
  const Mat k = linear(x, lw.key_w, lw.key_b);
  const Mat v = linear(x, lw.value_w, lw.value_b);
  const std::size_t n = x.rows;
  const std::size_t d = cfg.head_dim();
  const float scale = 1.0f / std::sqrt(static_cast<float>(d));
  Mat ctx(n, cfg.hidden_size);
  std::vector<float> probs(n * n);
  for (std::size_t h = 0; h < cfg.num_heads; ++h) {
    const std::size_t off = h * d;
    for (std::size_t i = 0; i < n; ++i) {
      float* p = probs.data() + i * n;
      float max_score = -INFINITY;
      for (std::size_t j = 0; j < n; ++j) {
        float s = 0.0f;
        for (std::size_t t = 0; t < d; ++t) {
          s += q.row(i)[off + t] * k.row(j)[off + t];
        }
        p[j] = s * scale;
        max_score = std::max(max_score, p[j]);
      }
      float sum = 0.0f;
      for (std::size_t j = 0; j < n; ++j) {
        p[j] = std::exp(p[j] - max_score);
        sum += p[j];
      }
      for (std::size_t j = 0; j < n; ++j) p[j] /= sum;
      float* out = ctx.row(i) + off;
      for (std::size_t j = 0; j < n; ++j) {
        const float* vr = v.row(j) + off;
        for (std::size_t t = 0; t < d; ++t) out[t] += p[j] * vr[t];
      }
    }
    if (trace) trace->push_back(probs);
  }
  return linear(ctx, lw.output_w, lw.output_b);
}

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(buf, buf + sizeof(T));
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

std::string serialize_data(const PertConfig& config, const PertWeights& weights,
                           json& table) {
  const auto names = tensor_names(config);
  const auto slots = tensor_slots(weights);
  std::string data;
  table = json::array();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const Tensor& t = *slots[i];
    table.push_back({{"name", names[i].first},
                     {"shape", names[i].second},
                     {"offset", data.size()}});
    for (float f : t.data) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
      for (int b = 0; b < 4; ++b) {
        data.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
      }
    }
  }
  return data;
}

std::size_t get_size(const json& config, const char* key) {
  auto it = config.find(key);
  if (it == config.end() || !it->is_number_unsigned()) {
    throw FormatError(std::string("manifest config lacks integer '") + key +
                      "'");
  }
  return it->get<std::size_t>();
}

}  // namespace

PertConfig PertConfig::named(std::string_view scale, std::size_t pinyin_vocab,
                             std::size_t char_vocab) {
  struct Row {
    std::string_view name;
    std::size_t layers, hidden;
  };
  static constexpr Row kGrid[] = {{"tiny", 2, 128},
                                  {"mini", 4, 256},
                                  {"small", 4, 512},
                                  {"medium", 8, 512},
                                  {"base", 12, 768}};
  for (const auto& row : kGrid) {
    if (row.name != scale) continue;
    PertConfig c;
    c.num_layers = row.layers;
    c.hidden_size = row.hidden;
    c.num_heads = row.hidden / 64;
    c.ff_size = 4 * row.hidden;
    c.pinyin_vocab_size = pinyin_vocab;
    c.char_vocab_size = char_vocab;
    return c;
  }
  throw ConfigError("unknown model scale '" + std::string(scale) + "'");
}

void PertConfig::validate() const {
  if (num_layers == 0 || hidden_size == 0 || num_heads == 0 || ff_size == 0 ||
      pinyin_vocab_size == 0 || char_vocab_size == 0 || max_len == 0) {
    throw ConfigError("PERT config has a zero dimension");
  }
  if (hidden_size % num_heads != 0) {
    throw ConfigError("hidden size " + std::to_string(hidden_size) +
                      " not divisible by " + std::to_string(num_heads) +
                      " heads");
  }
  if (!(layernorm_epsilon > 0.0f)) {
    throw ConfigError("layernorm epsilon must be positive");
  }
}

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
  data.assign(numel(), 0.0f);
}

std::size_t Tensor::numel() const {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> tensor_names(
    const PertConfig& c) {
  const std::size_t h = c.hidden_size;
  std::vector<std::pair<std::string, std::vector<std::size_t>>> out = {
      {"embeddings.token", {c.pinyin_vocab_size, h}},
      {"embeddings.position", {c.max_len, h}},
      {"embeddings.layernorm.gamma", {h}},
      {"embeddings.layernorm.beta", {h}},
  };
  for (std::size_t l = 0; l < c.num_layers; ++l) {
    const std::string p = "layers." + std::to_string(l) + ".";
    for (const char* proj : {"query", "key", "value", "output"}) {
      out.push_back({p + "attention." + proj + ".weight", {h, h}});
      out.push_back({p + "attention." + proj + ".bias", {h}});
    }
    out.push_back({p + "attention.layernorm.gamma", {h}});
    out.push_back({p + "attention.layernorm.beta", {h}});
    out.push_back({p + "ffn.intermediate.weight", {h, c.ff_size}});
    out.push_back({p + "ffn.intermediate.bias", {c.ff_size}});
    out.push_back({p + "ffn.output.weight", {c.ff_size, h}});
    out.push_back({p + "ffn.output.bias", {h}});
    out.push_back({p + "ffn.layernorm.gamma", {h}});
    out.push_back({p + "ffn.layernorm.beta", {h}});
  }
  out.push_back({"classifier.weight", {h, c.char_vocab_size}});
  out.push_back({"classifier.bias", {c.char_vocab_size}});
  return out;
}

std::vector<Tensor*> tensor_slots(PertWeights& w) {
  std::vector<Tensor*> out = {&w.token_embedding, &w.position_embedding,
                              &w.embedding_ln_gamma, &w.embedding_ln_beta};
  for (auto& l : w.layers) {
    for (Tensor* t :
         {&l.query_w, &l.query_b, &l.key_w, &l.key_b, &l.value_w, &l.value_b,
          &l.output_w, &l.output_b, &l.attention_ln_gamma,
          &l.attention_ln_beta, &l.ffn_in_w, &l.ffn_in_b, &l.ffn_out_w,
          &l.ffn_out_b, &l.ffn_ln_gamma, &l.ffn_ln_beta}) {
      out.push_back(t);
    }
  }
  out.push_back(&w.classifier_w);
  out.push_back(&w.classifier_b);
  return out;
}

std::vector<const Tensor*> tensor_slots(const PertWeights& w) {
  auto mutable_slots = tensor_slots(const_cast<PertWeights&>(w));
  return {mutable_slots.begin(), mutable_slots.end()};
}

PertWeights PertWeights::zeros(const PertConfig& config) {
  PertWeights w;
  w.layers.resize(config.num_layers);
  const auto names = tensor_names(config);
  const auto slots = tensor_slots(w);
  for (std::size_t i = 0; i < names.size(); ++i) {
    *slots[i] = Tensor(names[i].second);
    if (names[i].first.ends_with(".gamma")) {
      std::fill(slots[i]->data.begin(), slots[i]->data.end(), 1.0f);
    }
  }
  return w;
}

PertModel::PertModel(PertConfig config, PertWeights weights)
    : config_(std::move(config)), weights_(std::move(weights)) {
  config_.validate();
  if (weights_.layers.size() != config_.num_layers) {
    throw ShapeMismatch("layers", std::to_string(config_.num_layers),
                        std::to_string(weights_.layers.size()));
  }
  const auto names = tensor_names(config_);
  const auto slots = tensor_slots(weights_);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (slots[i]->shape != names[i].second ||
        slots[i]->data.size() != slots[i]->numel()) {
      throw ShapeMismatch(names[i].first, shape_string(names[i].second),
                          shape_string(slots[i]->shape));
    }
  }
}

EmissionMatrix PertModel::forward(std::span<const SyllableId> pinyin,
                                  ForwardTrace* trace) const {
  const std::size_t n = pinyin.size();
  if (n == 0) throw EmptyInput("empty pinyin sequence");
  if (n > config_.max_len) {
    throw SequenceTooLong("sequence of " + std::to_string(n) +
                          " exceeds max length " +
                          std::to_string(config_.max_len));
  }
  const std::size_t h = config_.hidden_size;
  Mat x(n, h);
  for (std::size_t i = 0; i < n; ++i) {
    const SyllableId id = pinyin[i];
    if (id < 0 || static_cast<std::size_t>(id) >= config_.pinyin_vocab_size) {
      throw InvalidTokenId("syllable id " + std::to_string(id) +
                           " out of range");
    }
    const float* tok = weights_.token_embedding.data.data() +
                       static_cast<std::size_t>(id) * h;
    const float* pos = weights_.position_embedding.data.data() + i * h;
    for (std::size_t j = 0; j < h; ++j) x.row(i)[j] = tok[j] + pos[j];
  }
  layernorm(x, weights_.embedding_ln_gamma, weights_.embedding_ln_beta,
            config_.layernorm_epsilon);
  if (trace) trace->attention.clear();

  for (const auto& lw : weights_.layers) {
    std::vector<std::vector<float>>* heads = nullptr;
    if (trace) heads = &trace->attention.emplace_back();
    add_inplace(x, self_attention(x, lw, config_, heads));
    layernorm(x, lw.attention_ln_gamma, lw.attention_ln_beta,
              config_.layernorm_epsilon);
    Mat inner = linear(x, lw.ffn_in_w, lw.ffn_in_b);
    for (float& f : inner.v) f = gelu(f);
    add_inplace(x, linear(inner, lw.ffn_out_w, lw.ffn_out_b));
    layernorm(x, lw.ffn_ln_gamma, lw.ffn_ln_beta, config_.layernorm_epsilon);
  }

  const Mat logits = linear(x, weights_.classifier_w, weights_.classifier_b);
  const std::size_t vocab = config_.char_vocab_size;
  EmissionMatrix em(n, vocab);
  for (std::size_t i = 0; i < n; ++i) {
    const float* lr = logits.row(i);
    const double max_logit = *std::max_element(lr, lr + vocab);
    double sum = 0.0;
    for (std::size_t j = 0; j < vocab; ++j) sum += std::exp(lr[j] - max_logit);
    const double log_z = max_logit + std::log(sum);
    auto p = em.mutable_row(i);
    auto lp = em.mutable_log_row(i);
    for (std::size_t j = 0; j < vocab; ++j) {
      lp[j] = static_cast<double>(lr[j]) - log_z;
      p[j] = std::exp(lp[j]);
    }
  }
  return em;
}

std::string PertModel::describe() const {
  std::ostringstream s;
  s << "pert(L=" << config_.num_layers << ",H=" << config_.hidden_size
    << ",A=" << config_.num_heads << ")";
  return s.str();
}

void PertModel::verify_vocab(const CharDict& dict) const {
  if (config_.pinyin_vocab_size != dict.syllable_vocab_size() ||
      pinyin_checksum_ != dict.syllable_checksum()) {
    throw ChecksumMismatch("weights were exported for a different syllable "
                           "vocabulary (" +
                           to_hex(pinyin_checksum_) + " vs " +
                           to_hex(dict.syllable_checksum()) + ")");
  }
  if (config_.char_vocab_size != dict.char_vocab_size() ||
      char_checksum_ != dict.char_checksum()) {
    throw ChecksumMismatch("weights were exported for a different character "
                           "vocabulary (" +
                           to_hex(char_checksum_) + " vs " +
                           to_hex(dict.char_checksum()) + ")");
  }
}

void PertModel::save(std::ostream& out) const {
  json table;
  const std::string data = serialize_data(config_, weights_, table);
  Fnv1a64 digest;
  digest.update(data);
  json manifest = {
      {"format", "PERTW1"},
      {"config",
       {{"num_layers", config_.num_layers},
        {"hidden_size", config_.hidden_size},
        {"num_heads", config_.num_heads},
        {"ff_size", config_.ff_size},
        {"pinyin_vocab_size", config_.pinyin_vocab_size},
        {"char_vocab_size", config_.char_vocab_size},
        {"max_len", config_.max_len},
        {"layernorm_epsilon", config_.layernorm_epsilon},
        {"activation", "gelu"}}},
      {"pinyin_vocab_checksum", to_hex(pinyin_checksum_)},
      {"char_vocab_checksum", to_hex(char_checksum_)},
      {"data_checksum", to_hex(digest.digest())},
      {"tensors", table}};
  const std::string text = manifest.dump();
  out.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("failed writing weights");
}

void PertModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  save(out);
}

PertModel PertModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return load(in);
}

PertModel PertModel::load(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a PERTW1 file (bad magic)");
  }
  unsigned char len_bytes[4];
  if (!in.read(reinterpret_cast<char*>(len_bytes), 4)) {
    throw FormatError("weights file truncated in header");
  }
  const std::uint32_t manifest_len =
      static_cast<std::uint32_t>(len_bytes[0]) |
      static_cast<std::uint32_t>(len_bytes[1]) << 8 |
      static_cast<std::uint32_t>(len_bytes[2]) << 16 |
      static_cast<std::uint32_t>(len_bytes[3]) << 24;
  if (manifest_len == 0 || manifest_len > kMaxManifestBytes) {
    throw FormatError("implausible manifest length");
  }
  std::string text(manifest_len, '\0');
  if (!in.read(text.data(), manifest_len)) {
    throw FormatError("weights file truncated in manifest");
  }
  const std::string data{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};

  json manifest;
  try {
    manifest = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!manifest.is_object() || !manifest.contains("config") ||
      !manifest["config"].is_object() || !manifest.contains("tensors") ||
      !manifest["tensors"].is_array()) {
    throw FormatError("manifest lacks config or tensor table");
  }
  const json& jc = manifest["config"];
  PertConfig config;
  config.num_layers = get_size(jc, "num_layers");
  config.hidden_size = get_size(jc, "hidden_size");
  config.num_heads = get_size(jc, "num_heads");
  config.ff_size = get_size(jc, "ff_size");
  config.pinyin_vocab_size = get_size(jc, "pinyin_vocab_size");
  config.char_vocab_size = get_size(jc, "char_vocab_size");
  config.max_len = get_size(jc, "max_len");
  if (jc.contains("layernorm_epsilon")) {
    if (!jc["layernorm_epsilon"].is_number()) {
      throw FormatError("layernorm_epsilon must be a number");
    }
    config.layernorm_epsilon = jc["layernorm_epsilon"].get<float>();
  }
  if (jc.contains("activation") && jc["activation"] != "gelu") {
    throw FormatError("unsupported activation " + jc["activation"].dump());
  }
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw FormatError(e.what());
  }

  if (manifest.contains("data_checksum")) {
    if (!manifest["data_checksum"].is_string()) {
      throw FormatError("data_checksum must be a string");
    }
    Fnv1a64 digest;
    digest.update(data);
    if (digest.digest() !=
        from_hex(manifest["data_checksum"].get<std::string>())) {
      throw FormatError("tensor data does not match data_checksum");
    }
  }

  const auto expected = tensor_names(config);
  std::map<std::string, std::size_t> wanted;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    wanted[expected[i].first] = i;
  }

  PertWeights weights;
  weights.layers.resize(config.num_layers);
  const auto slots = tensor_slots(weights);
  std::vector<bool> seen(expected.size(), false);
  for (const auto& entry : manifest["tensors"]) {
    if (!entry.is_object() || !entry.contains("name") ||
        !entry["name"].is_string() || !entry.contains("shape") ||
        !entry["shape"].is_array() || !entry.contains("offset") ||
        !entry["offset"].is_number_unsigned()) {
      throw FormatError("malformed tensor table entry");
    }
    const auto name = entry["name"].get<std::string>();
    if (name.find("segment") != std::string::npos ||
        name.find("token_type") != std::string::npos) {
      throw FormatError("tensor '" + name +
                        "': the encoder has no segment embedding");
    }
    auto it = wanted.find(name);
    if (it == wanted.end()) throw FormatError("unexpected tensor '" + name + "'");
    const std::size_t idx = it->second;
    if (seen[idx]) throw FormatError("tensor '" + name + "' listed twice");
    seen[idx] = true;
    std::vector<std::size_t> shape;
    for (const auto& d : entry["shape"]) {
      if (!d.is_number_unsigned()) throw FormatError("bad shape for " + name);
      shape.push_back(d.get<std::size_t>());
    }
    if (shape != expected[idx].second) {
      throw ShapeMismatch(name, shape_string(expected[idx].second),
                          shape_string(shape));
    }
    Tensor t(shape);
    const std::size_t offset = entry["offset"].get<std::size_t>();
    const std::size_t bytes = t.numel() * 4;
    if (offset > data.size() || data.size() - offset < bytes) {
      throw FormatError("tensor '" + name + "' runs past end of file");
    }
    for (std::size_t i = 0; i < t.numel(); ++i) {
      const auto* b =
          reinterpret_cast<const unsigned char*>(data.data() + offset + 4 * i);
      const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) |
                                 static_cast<std::uint32_t>(b[1]) << 8 |
                                 static_cast<std::uint32_t>(b[2]) << 16 |
                                 static_cast<std::uint32_t>(b[3]) << 24;
      const float f = std::bit_cast<float>(bits);
      if (!std::isfinite(f)) {
        throw FormatError("tensor '" + name + "' holds a non-finite value");
      }
      t.data[i] = f;
    }
    *slots[idx] = std::move(t);
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (!seen[i]) throw FormatError("missing tensor '" + expected[i].first + "'");
  }

  PertModel model(config, std::move(weights));
  const auto checksum = [&](const char* key) -> std::uint64_t {
    if (!manifest.contains(key) || !manifest[key].is_string()) {
      throw FormatError(std::string("manifest lacks ") + key);
    }
    return from_hex(manifest[key].get<std::string>());
  };
  model.set_vocab_checksums(checksum("pinyin_vocab_checksum"),
                            checksum("char_vocab_checksum"));
  return model;
}

}  // namespace p2c
