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

#include "support.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "p2c/utf8.h"

#ifndef P2C_TEST_DATA_DIR
#error "P2C_TEST_DATA_DIR must be defined by the build"
#endif

namespace p2c::testing {

std::string data_dir() { return P2C_TEST_DATA_DIR; }

std::string data_path(const std::string& name) {
  return (std::filesystem::path(data_dir()) / name).string();
}

CharDict dict_from(const std::string& text) {
  std::istringstream in(text);
  return CharDict::parse(in);
}

WordLexicon lexicon_from(const std::string& text, const CharDict& dict,
                         const std::string& name) {
  std::istringstream in(text);
  return WordLexicon::parse(in, dict, name);
}

std::vector<CharId> ids(const CharDict& dict, std::u32string_view text) {
  auto encoded = dict.encode(text);
  if (!encoded) throw std::invalid_argument("text outside the fixture vocab");
  return *encoded;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = base / ("p2c-test-" + std::to_string(::getpid()) + "-" +
                             std::to_string(counter++));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << contents;
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

PertModel bias_only_pert(const CharDict& dict, const std::vector<float>& bias,
                         std::size_t max_len) {
  PertConfig config;
  config.num_layers = 1;
  config.hidden_size = 4;
  config.num_heads = 1;
  config.ff_size = 4;
  config.pinyin_vocab_size = dict.syllable_vocab_size();
  config.char_vocab_size = dict.char_vocab_size();
  config.max_len = max_len;
  PertWeights weights = PertWeights::zeros(config);
  if (bias.size() != config.char_vocab_size) {
    throw std::invalid_argument("bias must cover the character vocabulary");
  }
  weights.classifier_b.data = bias;
  PertModel model(config, std::move(weights));
  model.set_vocab_checksums(dict.syllable_checksum(), dict.char_checksum());
  return model;
}

EmissionMatrix sparse_emission(
    std::size_t n, std::size_t vocab,
    const std::vector<std::vector<std::pair<CharId, double>>>& rows) {
  std::vector<double> probs(n * vocab, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double used = 0.0;
    std::vector<bool> set(vocab, false);
    if (i < rows.size()) {
      for (auto [id, p] : rows[i]) {
        probs[i * vocab + static_cast<std::size_t>(id)] = p;
        set[static_cast<std::size_t>(id)] = true;
        used += p;
      }
    }
    const auto free = static_cast<double>(std::count(set.begin(), set.end(), false));
    const double rest = free > 0 ? std::max(0.0, 1.0 - used) / free : 0.0;
    for (std::size_t c = 0; c < vocab; ++c) {
      if (!set[c]) probs[i * vocab + c] = rest;
    }
  }
  return EmissionMatrix::from_probs(n, vocab, std::move(probs));
}

RandomInstance random_instance(std::mt19937_64& rng, const RandomSpec& spec) {
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  auto real = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  // Synthetic dictionary: 5 syllables over a pool of 8 characters, so that
  // characters are shared between syllables and lexicon words can mix them.
  constexpr std::size_t kPool = 8;
  const char* const syllables[] = {"ba", "ce", "di", "fo", "gu"};
  std::string text = "# p2c-dict v1\n";
  for (const char* s : syllables) {
    std::vector<std::size_t> pool(kPool);
    for (std::size_t i = 0; i < kPool; ++i) pool[i] = i;
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t count = uniform(1, spec.max_candidates);
    text += s;
    for (std::size_t i = 0; i < count; ++i) {
      text += ' ' + utf8::encode(static_cast<char32_t>(0x4E00 + pool[i]));
    }
    text += '\n';
  }
  RandomInstance inst;
  inst.dict = std::make_shared<CharDict>(dict_from(text));
  const CharDict& dict = *inst.dict;

  const std::size_t n = uniform(1, spec.max_n);
  PinyinSequence pinyin;
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.allow_unknown && uniform(0, 9) == 0) {
      pinyin.push_back("zz");
    } else {
      pinyin.push_back(syllables[uniform(0, 4)]);
    }
  }
  const auto syl = dict.to_ids(pinyin);

  // Words lie on the input's syllables; a third of their characters are
  // drawn from the whole pool, reading or not, as an out-of-dictionary word.
  std::vector<LexiconEntry> entries;
  const std::size_t words = n >= 2 ? uniform(0, spec.max_words) : 0;
  const auto chars = static_cast<CharId>(dict.char_vocab_size());
  for (std::size_t w = 0; w < words; ++w) {
    const std::size_t start = uniform(0, n - 2);
    const std::size_t len = uniform(2, std::min<std::size_t>(4, n - start));
    LexiconEntry e;
    for (std::size_t i = start; i < start + len; ++i) {
      e.pinyin.push_back(syl[i]);
      const auto cands = dict.candidates(syl[i]);
      if (cands.empty() || uniform(0, 2) == 0) {
        e.word.push_back(
            static_cast<CharId>(uniform(kFirstRegularId, chars - 1)));
      } else {
        e.word.push_back(cands[uniform(0, cands.size() - 1)]);
      }
    }
    entries.push_back(std::move(e));
  }
  inst.lexicon = std::make_shared<WordLexicon>(
      WordLexicon::from_entries(std::move(entries), "random"));
  inst.lattice = inject_words(build_lattice(syl, dict), *inst.lexicon);

  // Emission rows. One instance in four uses a coarse grid of values so
  // that exact score ties actually occur.
  const std::size_t vocab = dict.char_vocab_size();
  const bool coarse = uniform(0, 3) == 0;
  std::vector<double> probs(n * vocab);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < vocab; ++c) {
      double v = coarse ? static_cast<double>(uniform(1, 2)) : real(0.0, 1.0);
      if (!coarse && uniform(0, 19) == 0) v = 1e-16;  // below the floor
      probs[i * vocab + c] = v;
      sum += v;
    }
    for (std::size_t c = 0; c < vocab; ++c) probs[i * vocab + c] /= sum;
  }
  inst.em = EmissionMatrix::from_probs(n, vocab, std::move(probs));

  inst.ngram = std::make_shared<NgramModel>(vocab, dict.char_checksum(),
                                            real(0.0, 1.0));
  const std::size_t sentences = uniform(0, 12);
  for (std::size_t s = 0; s < sentences; ++s) {
    std::vector<CharId> sent(uniform(1, 6));
    for (auto& c : sent) {
      c = static_cast<CharId>(uniform(kFirstRegularId, vocab - 1));
    }
    inst.ngram->add_sentence(sent);
  }

  if (spec.random_lambdas) {
    inst.cfg.lambda_emit = real(0.0, 2.0);
    inst.cfg.lambda_trans = real(0.0, 2.0);
    if (uniform(0, 9) == 0) inst.cfg.lambda_trans = 0.0;
    if (inst.cfg.lambda_emit == 0.0 && inst.cfg.lambda_trans == 0.0) {
      inst.cfg.lambda_emit = 1.0;
    }
  }
  const double floors[] = {1e-12, 1e-6, 1e-3};
  inst.cfg.emission_floor = floors[uniform(0, 2)];
  inst.cfg.mode = spec.allow_combined && uniform(0, 1) == 0
                      ? DecodeMode::kCombined
                      : DecodeMode::kEmissionOnly;
  return inst;
}

double reference_path_score(const Lattice& lattice,
                            const std::vector<std::size_t>& node_indices,
                            const EmissionMatrix& em, const NgramModel* ngram,
                            const ScoreConfig& cfg) {
  const bool combined = cfg.mode == DecodeMode::kCombined;
  const double floor = cfg.emission_floor;
  double score = 0.0;
  CharId prev = combined ? ngram->bos() : 0;
  for (std::size_t index : node_indices) {
    const LatticeNode& node = lattice.node(index);
    double e = 0.0;
    if (node.placeholder) {
      e = std::log(floor);
    } else {
      double sum = 0.0;
      for (std::size_t i = 0; i < node.surface.size(); ++i) {
        const CharId c = node.surface[i];
        const double p = static_cast<std::size_t>(c) < em.vocab()
                             ? em.prob(node.start + i, c)
                             : 0.0;
        sum += std::log(std::max(p, floor));
      }
      e = sum / static_cast<double>(node.surface.size());
    }
    score += cfg.lambda_emit * e;
    if (combined) {
      for (CharId c : node.surface) {
        score += cfg.lambda_trans * ngram->log_prob(prev, c);
        prev = c;
      }
    }
  }
  if (combined) score += cfg.lambda_trans * ngram->log_prob(prev, ngram->eos());
  return score;
}

}  // namespace p2c::testing
