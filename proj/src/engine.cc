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

#include "p2c/engine.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "p2c/error.h"
#include "p2c/pert.h"

namespace p2c {
namespace {

std::vector<const WordLexicon*> select_lexicons(
    const Engine& engine,
    const std::optional<std::vector<std::string>>& names) {
  std::vector<const WordLexicon*> out;
  if (!names) {
    for (const auto& lex : engine.lexicons) out.push_back(lex.get());
    return out;
  }
  for (const auto& name : *names) {
    const WordLexicon* found = nullptr;
    for (const auto& lex : engine.lexicons) {
      if (lex->name() == name) {
        found = lex.get();
        break;
      }
    }
    if (!found) throw ConfigError("no lexicon named '" + name + "'");
    out.push_back(found);
  }
  return out;
}

}  // namespace

std::string Engine::describe() const {
  std::ostringstream s;
  s << (emission ? emission->describe() : "none");
  if (ngram) s << "+bigram";
  for (const auto& lex : lexicons) s << "+lex:" << lex->name();
  s << " mode=" << to_string(score.mode);
  return s.str();
}

Lattice engine_lattice(const PinyinSequence& pinyin, const Engine& engine,
                       const std::optional<std::vector<std::string>>& names) {
  const auto lexicons = select_lexicons(engine, names);
  Lattice lattice = build_lattice(pinyin, *engine.dict);
  return inject_words(std::move(lattice), lexicons);
}

Conversion convert_detailed(const PinyinSequence& pinyin, const Engine& engine,
                            const ConvertOptions& options) {
  if (!engine.dict || !engine.emission) {
    throw ConfigError("engine lacks a dictionary or emission model");
  }
  ScoreConfig cfg = engine.score;
  if (options.mode) cfg.mode = *options.mode;
  const std::size_t k = options.k.value_or(engine.k);
  Lattice lattice = engine_lattice(pinyin, engine, options.lexicons);
  EmissionMatrix em = engine.emission->emission(lattice.pinyin());
  auto paths = topk(lattice, em, engine.ngram.get(), cfg, k);
  return {std::move(lattice), std::move(em), std::move(paths)};
}

std::vector<DecodedPath> convert(const PinyinSequence& pinyin,
                                 const Engine& engine, std::size_t k) {
  ConvertOptions options;
  options.k = k;
  return convert_detailed(pinyin, engine, options).paths;
}

EngineConfigFile EngineConfigFile::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();
  const auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return (fp.is_absolute() ? fp : base / fp).string();
  };
  EngineConfigFile cfg;
  try {
    cfg.char_dict = resolve(j.at("char_dict").get<std::string>());
    cfg.weights = resolve(j.at("weights").get<std::string>());
    if (j.contains("ngram") && !j["ngram"].is_null()) {
      cfg.ngram = resolve(j["ngram"].get<std::string>());
    }
    if (j.contains("lexicons")) {
      for (const auto& item : j["lexicons"]) {
        if (item.is_string()) {
          cfg.lexicons.emplace_back("", resolve(item.get<std::string>()));
        } else {
          cfg.lexicons.emplace_back(item.value("name", ""),
                                    resolve(item.at("path").get<std::string>()));
        }
      }
    }
    cfg.score.mode = parse_mode(j.value("mode", "combined"));
    cfg.score.lambda_emit = j.value("lambda_emit", 1.0);
    cfg.score.lambda_trans = j.value("lambda_trans", 1.0);
    cfg.score.emission_floor = j.value("emission_floor", 1e-12);
    cfg.k = j.value("k", std::size_t{5});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  cfg.score.validate();
  if (cfg.k == 0) throw ConfigError("k must be at least 1");
  return cfg;
}

Engine assemble_engine(const EngineConfigFile& config) {
  config.score.validate();
  Engine engine;
  auto dict = std::make_shared<CharDict>(CharDict::load(config.char_dict));
  engine.dict = dict;
  for (const auto& [name, path] : config.lexicons) {
    engine.lexicons.push_back(
        std::make_shared<WordLexicon>(WordLexicon::load(path, *dict, name)));
  }
  auto model = std::make_shared<PertModel>(PertModel::load(config.weights));
  model->verify_vocab(*dict);
  engine.emission = model;
  if (!config.ngram.empty()) {
    engine.ngram =
        std::make_shared<NgramModel>(NgramModel::load(config.ngram, *dict));
  }
  if (config.score.mode == DecodeMode::kCombined && !engine.ngram) {
    throw ConfigError("combined mode requires an n-gram model");
  }
  engine.score = config.score;
  engine.k = config.k;
  return engine;
}

}  // namespace p2c
