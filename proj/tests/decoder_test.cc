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

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "p2c/decoder.h"
#include "p2c/error.h"
#include "support.h"

using namespace p2c;
using p2c::testing::dict_from;
using p2c::testing::random_instance;
using p2c::testing::RandomSpec;
using p2c::testing::reference_path_score;
using p2c::testing::sparse_emission;

namespace {

ScoreConfig emission_only() {
  ScoreConfig cfg;
  cfg.mode = DecodeMode::kEmissionOnly;
  return cfg;
}

// Best path per surface from full enumeration, ordered by score then
// node-index sequence.
std::vector<DecodedPath> enumerate_best(const Lattice& lattice,
                                        const EmissionMatrix& em,
                                        const NgramModel* ngram,
                                        const ScoreConfig& cfg) {
  std::map<std::vector<CharId>, DecodedPath> best;
  for_each_path(lattice, em, ngram, cfg, [&](const DecodedPath& p) {
    auto it = best.find(p.surface);
    if (it == best.end() || p.score > it->second.score ||
        (p.score == it->second.score && p.node_indices < it->second.node_indices)) {
      best[p.surface] = p;
    }
  });
  std::vector<DecodedPath> out;
  for (auto& [surface, path] : best) out.push_back(path);
  std::sort(out.begin(), out.end(), [](const DecodedPath& a, const DecodedPath& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.node_indices < b.node_indices;
  });
  return out;
}

}  // namespace

TEST_SUITE("decoder") {
  TEST_CASE("word emission is the geometric mean in log space") {
    LatticeNode word{3, 6, {2, 3, 4}, NodeKind::kWord, false, {}};
    const double p1 = 0.2, p2 = 0.05, p3 = 0.6;
    const auto em = sparse_emission(6, 5, {{}, {}, {}, {{2, p1}}, {{3, p2}}, {{4, p3}}});
    const double expect = (std::log(p1) + std::log(p2) + std::log(p3)) / 3.0;
    CHECK(node_emission_logscore(word, em, 1e-12) == doctest::Approx(expect).epsilon(1e-14));

    LatticeNode single{3, 4, {2}, NodeKind::kChar, false, {}};
    CHECK(node_emission_logscore(single, em, 1e-12) == doctest::Approx(std::log(p1)));

    const auto flat = sparse_emission(3, 5, {{{2, 0.3}}, {{3, 0.3}}, {{4, 0.3}}});
    LatticeNode same{0, 3, {2, 3, 4}, NodeKind::kWord, false, {}};
    CHECK(node_emission_logscore(same, flat, 1e-12) == doctest::Approx(std::log(0.3)));
  }

  TEST_CASE("floor, placeholder and out-of-range ids") {
    const auto em = sparse_emission(2, 4, {{{2, 1.0}}, {{3, 1.0}}});
    LatticeNode zero{0, 1, {3}, NodeKind::kChar, false, {}};
    CHECK(node_emission_logscore(zero, em, 1e-6) == doctest::Approx(std::log(1e-6)));
    LatticeNode ph{0, 1, {kUnknownId}, NodeKind::kChar, true, {}};
    CHECK(node_emission_logscore(ph, em, 1e-6) == doctest::Approx(std::log(1e-6)));
    LatticeNode far{0, 1, {99}, NodeKind::kChar, false, {}};
    CHECK(node_emission_logscore(far, em, 1e-6) == doctest::Approx(std::log(1e-6)));
  }

  TEST_CASE("emission-only on a char lattice is the per-position argmax") {
    std::mt19937_64 rng(53);
    RandomSpec spec;
    spec.max_words = 0;
    spec.allow_combined = false;
    for (int trial = 0; trial < 100; ++trial) {
      auto inst = random_instance(rng, spec);
      inst.cfg.emission_floor = 1e-300;
      const auto path = viterbi(inst.lattice, inst.em, nullptr, inst.cfg);
      for (std::size_t i = 0; i < inst.lattice.size(); ++i) {
        double best = -1.0;
        CharId arg = 0;
        for (std::size_t n : inst.lattice.starting_at(i)) {
          const CharId c = inst.lattice.node(n).surface[0];
          if (inst.em.prob(i, c) > best) {
            best = inst.em.prob(i, c);
            arg = c;
          }
        }
        CHECK(path.surface[i] == arg);
      }
    }
  }

  TEST_CASE("two by two fixture against exhaustive maximum") {
    const auto dict = dict_from("# p2c-dict v1\nwo 我 窝\nmen 们 门\n");
    const auto lattice = build_lattice(PinyinSequence{"wo", "men"}, dict);
    const auto em = sparse_emission(2, 6, {{{2, 0.6}, {3, 0.3}}, {{4, 0.4}, {5, 0.5}}});
    NgramModel ngram(6, dict.char_checksum());
    for (int i = 0; i < 3; ++i) ngram.add_sentence(std::vector<CharId>{2, 4});
    const ScoreConfig cfg;
    std::vector<DecodedPath> all;
    for_each_path(lattice, em, &ngram, cfg, [&](const DecodedPath& p) { all.push_back(p); });
    REQUIRE(all.size() == 4);
    const auto best = *std::max_element(all.begin(), all.end(),
        [](const DecodedPath& a, const DecodedPath& b) { return a.score < b.score; });
    const auto got = viterbi(lattice, em, &ngram, cfg);
    CHECK(got.surface == best.surface);
    CHECK(std::abs(got.score - best.score) <= 1e-9);
  }

  TEST_CASE("bigram context overturns a slight emission preference") {
    const auto dict = dict_from("# p2c-dict v1\nwo 我 窝\nmen 们 门\n");
    const auto lattice = build_lattice(PinyinSequence{"wo", "men"}, dict);
    // 我=2, 窝=3, 们=4, 门=5. Emission leans to 门 at position 1.
    const auto em = sparse_emission(2, 6, {{{2, 0.8}, {3, 0.1}}, {{4, 0.42}, {5, 0.48}}});
    NgramModel ngram(6, dict.char_checksum());
    for (int i = 0; i < 20; ++i) ngram.add_sentence(std::vector<CharId>{2, 4});
    ngram.add_sentence(std::vector<CharId>{5});
    const auto combined = viterbi(lattice, em, &ngram, ScoreConfig{});
    const auto plain = viterbi(lattice, em, nullptr, emission_only());
    CHECK(dict.surface(combined.surface) == "我们");
    CHECK(dict.surface(plain.surface) == "我门");
  }

  TEST_CASE("single path lattice") {
    const auto dict = dict_from("# p2c-dict v1\nni 你\nhao 好\n");
    const auto lattice = build_lattice(PinyinSequence{"ni", "hao"}, dict);
    const auto em = sparse_emission(2, 4, {});
    const auto path = brute_force(lattice, em, nullptr, emission_only());
    CHECK(dict.surface(path.surface) == "你好");
    CHECK(path.node_indices == std::vector<std::size_t>{0, 1});
  }

  TEST_CASE("exact ties go to the earlier node sequence") {
    const auto dict = dict_from("# p2c-dict v1\nwo 我 窝\nmen 们 门\n");
    const auto lattice = build_lattice(PinyinSequence{"wo", "men"}, dict);
    const auto em = sparse_emission(2, 6, {{{2, 0.25}, {3, 0.25}}, {{4, 0.25}, {5, 0.25}}});
    const auto v = viterbi(lattice, em, nullptr, emission_only());
    const auto b = brute_force(lattice, em, nullptr, emission_only());
    CHECK(dict.surface(v.surface) == "我们");
    CHECK(v.node_indices == b.node_indices);
    const auto top = topk(lattice, em, nullptr, emission_only(), 4);
    REQUIRE(top.size() == 4);
    CHECK(dict.surface(top[1].surface) == "我门");
    CHECK(dict.surface(top[2].surface) == "窝们");
    CHECK(dict.surface(top[3].surface) == "窝门");
  }

  TEST_CASE("top-k on the four-path lattice matches the sorted enumeration") {
    const auto dict = dict_from("# p2c-dict v1\nwo 我 窝\nmen 们 门\n");
    const auto lattice = build_lattice(PinyinSequence{"wo", "men"}, dict);
    const auto em = sparse_emission(2, 6, {{{2, 0.5}, {3, 0.3}}, {{4, 0.1}, {5, 0.7}}});
    NgramModel ngram(6, dict.char_checksum());
    ngram.add_sentence(std::vector<CharId>{3, 4});
    const ScoreConfig cfg;
    const auto expect = enumerate_best(lattice, em, &ngram, cfg);
    const auto got = topk(lattice, em, &ngram, cfg, 4);
    REQUIRE(got.size() == expect.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].surface == expect[i].surface);
      CHECK(std::abs(got[i].score - expect[i].score) <= 1e-9);
    }
    CHECK(topk(lattice, em, &ngram, cfg, 50).size() == 4);
    const auto one = topk(lattice, em, &ngram, cfg, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].surface == viterbi(lattice, em, &ngram, cfg).surface);
  }

  TEST_CASE("randomized agreement of viterbi, top-k and enumeration") {
    std::mt19937_64 rng(59);
    RandomSpec spec;
    spec.allow_unknown = true;
    for (int trial = 0; trial < 300; ++trial) {
      const auto inst = random_instance(rng, spec);
      const NgramModel* ngram = inst.ngram.get();
      const auto v = viterbi(inst.lattice, inst.em, ngram, inst.cfg);
      const auto b = brute_force(inst.lattice, inst.em, ngram, inst.cfg);
      CHECK(v.surface == b.surface);
      CHECK(v.node_indices == b.node_indices);
      CHECK(std::abs(v.score - b.score) <= 1e-9);

      const std::size_t k = 1 + rng() % 6;
      const auto expect = enumerate_best(inst.lattice, inst.em, ngram, inst.cfg);
      const auto got = topk(inst.lattice, inst.em, ngram, inst.cfg, k);
      REQUIRE(got.size() == std::min(k, expect.size()));
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].surface == expect[i].surface);
        CHECK(std::abs(got[i].score - expect[i].score) <= 1e-9);
      }
      CHECK(got[0].surface == v.surface);
    }
  }

  TEST_CASE("decoded paths are consistent tilings") {
    std::mt19937_64 rng(61);
    RandomSpec spec;
    spec.allow_unknown = true;
    for (int trial = 0; trial < 200; ++trial) {
      const auto inst = random_instance(rng, spec);
      for (const auto& p : topk(inst.lattice, inst.em, inst.ngram.get(), inst.cfg, 3)) {
        std::size_t pos = 0;
        double sum = 0.0;
        REQUIRE(p.nodes.size() == p.node_indices.size());
        REQUIRE(p.per_node.size() == p.nodes.size());
        for (std::size_t i = 0; i < p.nodes.size(); ++i) {
          CHECK(p.nodes[i].start == pos);
          CHECK(p.nodes[i] == inst.lattice.node(p.node_indices[i]));
          pos = p.nodes[i].end;
          sum += p.per_node[i].emission + p.per_node[i].transition;
        }
        CHECK(pos == inst.lattice.size());
        CHECK(p.surface.size() == inst.lattice.size());
        CHECK(std::abs(sum - p.score) <= 1e-9);
        CHECK(std::abs(reference_path_score(inst.lattice, p.node_indices, inst.em,
                                            inst.ngram.get(), inst.cfg) -
                       p.score) <= 1e-9);
      }
    }
  }

  TEST_CASE("zero transition weight reproduces emission-only decoding") {
    std::mt19937_64 rng(67);
    RandomSpec spec;
    for (int trial = 0; trial < 200; ++trial) {
      auto inst = random_instance(rng, spec);
      ScoreConfig combined = inst.cfg;
      combined.mode = DecodeMode::kCombined;
      combined.lambda_trans = 0.0;
      if (combined.lambda_emit == 0.0) combined.lambda_emit = 1.0;
      ScoreConfig plain = combined;
      plain.mode = DecodeMode::kEmissionOnly;
      const auto a = viterbi(inst.lattice, inst.em, inst.ngram.get(), combined);
      const auto b = viterbi(inst.lattice, inst.em, nullptr, plain);
      CHECK(a.surface == b.surface);
      CHECK(a.score == b.score);
    }
  }

  TEST_CASE("scaling emissions shifts scores and keeps the argmax") {
    // Every tiling of a char lattice has n nodes, so all scores move by the
    // same n * lambda_emit * ln c.
    std::mt19937_64 rng(71);
    RandomSpec spec;
    spec.max_words = 0;
    for (int trial = 0; trial < 200; ++trial) {
      auto inst = random_instance(rng, spec);
      inst.cfg.emission_floor = 1e-300;  // keep the floor out of the way
      const double c = std::exp(std::uniform_real_distribution<>(-3, 3)(rng));
      std::vector<double> scaled;
      for (std::size_t i = 0; i < inst.em.size(); ++i) {
        for (double p : inst.em.row(i)) scaled.push_back(std::max(p, 1e-200) * c);
      }
      const auto em2 = EmissionMatrix::from_probs(inst.em.size(), inst.em.vocab(),
                                                  std::move(scaled));
      const auto a = viterbi(inst.lattice, inst.em, inst.ngram.get(), inst.cfg);
      const auto b = viterbi(inst.lattice, em2, inst.ngram.get(), inst.cfg);
      const auto brute = brute_force(inst.lattice, em2, inst.ngram.get(), inst.cfg);
      CHECK(b.surface == brute.surface);
      // Exact float ties may legitimately resolve differently after scaling;
      // otherwise the surface is unchanged and the score shifts per node.
      if (a.node_indices == b.node_indices) {
        const double shift =
            static_cast<double>(a.nodes.size()) * inst.cfg.lambda_emit * std::log(c);
        CHECK(std::abs((b.score - a.score) - shift) <= 1e-9);
      } else {
        const double reference = reference_path_score(
            inst.lattice, a.node_indices, em2, inst.ngram.get(), inst.cfg);
        CHECK(std::abs(reference - b.score) <= 1e-9);
      }
    }
  }

  TEST_CASE("a word node never scores below its characters") {
    std::mt19937_64 rng(73);
    RandomSpec spec;
    spec.allow_combined = false;
    spec.max_words = 3;
    std::size_t checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const auto inst = random_instance(rng, spec);
      for_each_path(inst.lattice, inst.em, nullptr, inst.cfg, [&](const DecodedPath& p) {
        for (std::size_t i = 0; i < p.nodes.size(); ++i) {
          const auto& word = p.nodes[i];
          if (word.kind != NodeKind::kWord) continue;
          // Replace the word with char nodes spelling the same characters,
          // when the lattice has them.
          std::vector<std::size_t> chars;
          for (std::size_t j = 0; j < word.length(); ++j) {
            for (std::size_t n : inst.lattice.starting_at(word.start + j)) {
              const auto& node = inst.lattice.node(n);
              if (node.kind == NodeKind::kChar && node.surface[0] == word.surface[j]) {
                chars.push_back(n);
                break;
              }
            }
          }
          if (chars.size() != word.length()) continue;
          std::vector<std::size_t> alt(p.node_indices.begin(), p.node_indices.begin() + i);
          alt.insert(alt.end(), chars.begin(), chars.end());
          alt.insert(alt.end(), p.node_indices.begin() + i + 1, p.node_indices.end());
          const double alt_score =
              reference_path_score(inst.lattice, alt, inst.em, nullptr, inst.cfg);
          CHECK(p.score >= alt_score - 1e-12);
          ++checked;
        }
      });
    }
    CHECK(checked > 0);
  }

  TEST_CASE("errors") {
    const auto dict = dict_from("# p2c-dict v1\nwo 我 窝\n");
    const auto lattice = build_lattice(PinyinSequence{"wo"}, dict);
    const auto em = sparse_emission(1, 4, {});
    CHECK_THROWS_AS(viterbi(lattice, em, nullptr, ScoreConfig{}), ModeError);
    CHECK_THROWS_AS(viterbi(lattice, sparse_emission(2, 4, {}), nullptr, emission_only()),
                    ModeError);
    CHECK_THROWS_AS(topk(lattice, em, nullptr, emission_only(), 0), ConfigError);

    ScoreConfig bad = emission_only();
    bad.lambda_emit = -1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = emission_only();
    bad.lambda_emit = 0;
    bad.lambda_trans = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = emission_only();
    bad.emission_floor = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    const auto wide = dict_from("# p2c-dict v1\nwo 甲 乙 丙 丁\n");
    const auto big = build_lattice(PinyinSequence(11, "wo"), wide);
    CHECK_THROWS_AS(brute_force(big, sparse_emission(11, 6, {}), nullptr, emission_only()),
                    TooManyPaths);
    CHECK_NOTHROW(viterbi(big, sparse_emission(11, 6, {}), nullptr, emission_only()));
  }

  TEST_CASE("modes parse and print") {
    CHECK(parse_mode("emission") == DecodeMode::kEmissionOnly);
    CHECK(parse_mode("combined") == DecodeMode::kCombined);
    CHECK(std::string(to_string(DecodeMode::kCombined)) == "combined");
    CHECK_THROWS_AS(parse_mode("both"), ConfigError);
  }

  TEST_CASE("repeated decoding is identical") {
    std::mt19937_64 rng(79);
    RandomSpec spec;
    for (int trial = 0; trial < 50; ++trial) {
      const auto inst = random_instance(rng, spec);
      const auto a = topk(inst.lattice, inst.em, inst.ngram.get(), inst.cfg, 5);
      const auto b = topk(inst.lattice, inst.em, inst.ngram.get(), inst.cfg, 5);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].node_indices == b[i].node_indices);
        CHECK(a[i].score == b[i].score);
      }
    }
  }
}
