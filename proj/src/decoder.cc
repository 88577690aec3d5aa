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

#include "p2c/decoder.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "p2c/error.h"

namespace p2c {
namespace {

// Context id of the first node when no n-gram model is attached.
constexpr CharId kNoContext = -1;

double clamped_log(const EmissionMatrix& em, std::size_t pos, CharId id,
                   double floor) {
  if (id < 0 || static_cast<std::size_t>(id) >= em.vocab()) {
    return std::log(floor);
  }
  return std::log(std::max(em.prob(pos, id), floor));
}

class Scorer {
 public:
  Scorer(const Lattice& lattice, const EmissionMatrix& em,
         const NgramModel* ngram, const ScoreConfig& cfg)
      : lattice_(lattice), ngram_(ngram), cfg_(cfg) {
    cfg.validate();
    combined_ = cfg.mode == DecodeMode::kCombined;
    if (combined_ && ngram == nullptr) {
      throw ModeError("combined decoding needs an n-gram model");
    }
    if (em.size() != lattice.size()) {
      throw ModeError("emission matrix covers " + std::to_string(em.size()) +
                      " positions, lattice has " +
                      std::to_string(lattice.size()));
    }
    const auto& nodes = lattice.nodes();
    emission_.resize(nodes.size());
    internal_.resize(nodes.size(), 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      emission_[i] =
          cfg.lambda_emit * node_emission_logscore(nodes[i], em, cfg.emission_floor);
      if (combined_) {
        const auto& s = nodes[i].surface;
        double t = 0.0;
        for (std::size_t j = 1; j < s.size(); ++j) {
          t += ngram->log_prob(s[j - 1], s[j]);
        }
        internal_[i] = t;
      }
    }
  }

  CharId start_context() const { return ngram_ ? ngram_->bos() : kNoContext; }

  NodeScore contribution(CharId prev, std::size_t node) const {
    NodeScore s;
    s.emission = emission_[node];
    if (combined_) {
      const CharId first = lattice_.node(node).surface.front();
      s.transition =
          cfg_.lambda_trans * (ngram_->log_prob(prev, first) + internal_[node]);
    }
    return s;
  }

  double final_part(CharId last) const {
    if (!combined_) return 0.0;
    return cfg_.lambda_trans * ngram_->log_prob(last, ngram_->eos());
  }

  // Rescores a complete tiling in the same order the searches accumulate.
  DecodedPath build(const std::vector<std::size_t>& node_indices) const {
    DecodedPath path;
    path.node_indices = node_indices;
    CharId prev = start_context();
    double score = 0.0;
    for (std::size_t i : node_indices) {
      const NodeScore ns = contribution(prev, i);
      score += ns.emission + ns.transition;
      path.per_node.push_back(ns);
      const auto& node = lattice_.node(i);
      path.nodes.push_back(node);
      path.surface.insert(path.surface.end(), node.surface.begin(),
                          node.surface.end());
      prev = node.surface.back();
    }
    const double tail = final_part(prev);
    score += tail;
    if (!path.per_node.empty()) path.per_node.back().transition += tail;
    path.score = score;
    return path;
  }

 private:
  const Lattice& lattice_;
  const NgramModel* ngram_;
  const ScoreConfig& cfg_;
  bool combined_ = false;
  std::vector<double> emission_;
  std::vector<double> internal_;
};

struct Entry {
  double score = 0.0;
  std::vector<std::size_t> nodes;
  std::vector<CharId> surface;
};

bool better(const Entry& a, const Entry& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.nodes < b.nodes;
}

// Sorts best first, keeps the best entry per surface, then the first k.
void prune(std::vector<Entry>& entries, std::size_t k) {
  std::sort(entries.begin(), entries.end(), better);
  std::set<std::vector<CharId>> seen;
  std::vector<Entry> kept;
  for (auto& e : entries) {
    if (kept.size() == k) break;
    if (!seen.insert(e.surface).second) continue;
    kept.push_back(std::move(e));
  }
  entries = std::move(kept);
}

std::vector<Entry> search(const Lattice& lattice, const Scorer& scorer,
                          std::size_t k) {
  const std::size_t n = lattice.size();
  std::vector<std::map<CharId, std::vector<Entry>>> states(n + 1);
  states[0][scorer.start_context()].push_back(Entry{});
  for (std::size_t end = 1; end <= n; ++end) {
    auto& here = states[end];
    for (std::size_t i : lattice.ending_at(end)) {
      const auto& node = lattice.node(i);
      for (const auto& [prev, entries] : states[node.start]) {
        const NodeScore ns = scorer.contribution(prev, i);
        const double add = ns.emission + ns.transition;
        auto& bucket = here[node.surface.back()];
        for (const auto& e : entries) {
          Entry next;
          next.score = e.score + add;
          next.nodes = e.nodes;
          next.nodes.push_back(i);
          next.surface = e.surface;
          next.surface.insert(next.surface.end(), node.surface.begin(),
                              node.surface.end());
          bucket.push_back(std::move(next));
        }
      }
    }
    for (auto& [last, entries] : here) prune(entries, k);
  }
  std::vector<Entry> finals;
  for (auto& [last, entries] : states[n]) {
    const double tail = scorer.final_part(last);
    for (auto& e : entries) {
      e.score += tail;
      finals.push_back(std::move(e));
    }
  }
  prune(finals, k);
  return finals;
}

}  // namespace

const char* to_string(DecodeMode mode) {
  return mode == DecodeMode::kCombined ? "combined" : "emission";
}

DecodeMode parse_mode(std::string_view text) {
  if (text == "combined") return DecodeMode::kCombined;
  if (text == "emission") return DecodeMode::kEmissionOnly;
  throw ConfigError("unknown mode '" + std::string(text) +
                    "' (expected emission or combined)");
}

void ScoreConfig::validate() const {
  if (!(lambda_emit >= 0.0) || !(lambda_trans >= 0.0) ||
      !std::isfinite(lambda_emit) || !std::isfinite(lambda_trans)) {
    throw ConfigError("score weights must be finite and non-negative");
  }
  if (lambda_emit == 0.0 && lambda_trans == 0.0) {
    throw ConfigError("lambda_emit and lambda_trans cannot both be zero");
  }
  if (!(emission_floor > 0.0 && emission_floor < 1.0)) {
    throw ConfigError("emission floor must lie in (0, 1)");
  }
}

double node_emission_logscore(const LatticeNode& node, const EmissionMatrix& em,
                              double floor) {
  if (node.placeholder) return std::log(floor);
  const std::size_t k = node.surface.size();
  if (k == 1) return clamped_log(em, node.start, node.surface[0], floor);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sum += clamped_log(em, node.start + i, node.surface[i], floor);
  }
  return sum / static_cast<double>(k);
}

std::vector<DecodedPath> topk(const Lattice& lattice, const EmissionMatrix& em,
                              const NgramModel* ngram, const ScoreConfig& cfg,
                              std::size_t k) {
  if (k == 0) throw ConfigError("k must be at least 1");
  const Scorer scorer(lattice, em, ngram, cfg);
  const auto finals = search(lattice, scorer, k);
  if (finals.empty()) throw NoPath("no path spans the lattice");
  std::vector<DecodedPath> out;
  out.reserve(finals.size());
  for (const auto& e : finals) out.push_back(scorer.build(e.nodes));
  return out;
}

DecodedPath viterbi(const Lattice& lattice, const EmissionMatrix& em,
                    const NgramModel* ngram, const ScoreConfig& cfg) {
  return std::move(topk(lattice, em, ngram, cfg, 1).front());
}

void for_each_path(const Lattice& lattice, const EmissionMatrix& em,
                   const NgramModel* ngram, const ScoreConfig& cfg,
                   const std::function<void(const DecodedPath&)>& visit) {
  const Scorer scorer(lattice, em, ngram, cfg);
  std::vector<std::size_t> stack;
  std::function<void(std::size_t)> walk = [&](std::size_t pos) {
    if (pos == lattice.size()) {
      visit(scorer.build(stack));
      return;
    }
    for (std::size_t i : lattice.starting_at(pos)) {
      stack.push_back(i);
      walk(lattice.node(i).end);
      stack.pop_back();
    }
  };
  walk(0);
}

DecodedPath brute_force(const Lattice& lattice, const EmissionMatrix& em,
                        const NgramModel* ngram, const ScoreConfig& cfg) {
  const std::size_t paths = count_paths(lattice);
  if (paths > kBruteForcePathLimit) {
    throw TooManyPaths(std::to_string(paths) + " paths exceed the limit of " +
                       std::to_string(kBruteForcePathLimit));
  }
  if (paths == 0) throw NoPath("no path spans the lattice");
  const Scorer scorer(lattice, em, ngram, cfg);

  // Running score follows the same left-to-right accumulation as search().
  std::vector<std::size_t> stack;
  std::vector<std::size_t> best_nodes;
  double best_score = 0.0;
  bool have_best = false;
  std::function<void(std::size_t, CharId, double)> walk =
      [&](std::size_t pos, CharId prev, double score) {
        if (pos == lattice.size()) {
          const double total = score + scorer.final_part(prev);
          // Enumeration is in lexicographic order, so on equal scores the
          // first path seen wins.
          if (!have_best || total > best_score) {
            best_score = total;
            best_nodes = stack;
            have_best = true;
          }
          return;
        }
        for (std::size_t i : lattice.starting_at(pos)) {
          const auto& node = lattice.node(i);
          const NodeScore ns = scorer.contribution(prev, i);
          stack.push_back(i);
          walk(node.end, node.surface.back(),
               score + (ns.emission + ns.transition));
          stack.pop_back();
        }
      };
  walk(0, scorer.start_context(), 0.0);
  return scorer.build(best_nodes);
}

}  // namespace p2c
