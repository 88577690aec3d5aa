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

#include "p2c/cli.h"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "p2c/corpus.h"
#include "p2c/engine.h"
#include "p2c/error.h"
#include "p2c/eval.h"
#include "p2c/lattice.h"
#include "p2c/ngram.h"
#include "p2c/pert.h"
#include "p2c/service.h"
#include "p2c/utf8.h"

namespace p2c {
namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted.store(true); }

struct EngineFlags {
  std::string config;
  std::string char_dict;
  std::string weights;
  std::string ngram;
  std::vector<std::string> lexicons;
  std::string mode;
  std::optional<double> lambda_emit;
  std::optional<double> lambda_trans;
  std::optional<double> floor;
  std::optional<std::size_t> k;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "Engine config file (JSON)");
    cmd->add_option("--char-dict", char_dict, "Character dictionary");
    cmd->add_option("--weights", weights, "PERTW weight file");
    cmd->add_option("--ngram", ngram, "Bigram model file");
    cmd->add_option("--lexicon", lexicons, "Word lexicon (repeatable)");
    cmd->add_option("--mode", mode, "emission | combined")
        ->check(CLI::IsMember({"emission", "combined"}));
    cmd->add_option("--lambda-emit", lambda_emit, "Emission weight");
    cmd->add_option("--lambda-trans", lambda_trans, "Transition weight");
    cmd->add_option("--floor", floor, "Emission probability floor");
    cmd->add_option("--k", k, "Number of results")->check(CLI::PositiveNumber);
  }

  Engine build() const {
    EngineConfigFile cfg;
    if (!config.empty()) cfg = EngineConfigFile::load(config);
    if (!char_dict.empty()) cfg.char_dict = char_dict;
    if (!weights.empty()) cfg.weights = weights;
    if (!ngram.empty()) cfg.ngram = ngram;
    for (const auto& path : lexicons) cfg.lexicons.emplace_back("", path);
    if (cfg.char_dict.empty()) throw ConfigError("--char-dict is required");
    if (cfg.weights.empty()) throw ConfigError("--weights is required");
    if (!mode.empty()) {
      cfg.score.mode = parse_mode(mode);
    } else if (config.empty()) {
      cfg.score.mode = cfg.ngram.empty() ? DecodeMode::kEmissionOnly
                                         : DecodeMode::kCombined;
    }
    if (lambda_emit) cfg.score.lambda_emit = *lambda_emit;
    if (lambda_trans) cfg.score.lambda_trans = *lambda_trans;
    if (floor) cfg.score.emission_floor = *floor;
    if (k) cfg.k = *k;
    return assemble_engine(cfg);
  }
};

std::string format_score(double score) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", score);
  return buf;
}

void print_paths(std::ostream& out, const std::vector<DecodedPath>& paths,
                 const CharDict& dict, bool explain) {
  for (std::size_t r = 0; r < paths.size(); ++r) {
    const auto& p = paths[r];
    out << (r + 1) << '\t' << format_score(p.score) << '\t'
        << dict.surface(p.surface) << '\n';
    if (!explain) continue;
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
      const auto& n = p.nodes[i];
      out << "  [" << n.start << ',' << n.end << ") "
          << dict.surface(n.surface) << ' ' << to_string(n.kind)
          << " emission=" << format_score(p.per_node[i].emission)
          << " transition=" << format_score(p.per_node[i].transition) << '\n';
    }
  }
}

int run_prepare(const std::string& input, const std::string& out_path,
                std::size_t max_len, const std::string& dict_path,
                const std::string& lexicon_path, const std::string& stats_path,
                std::ostream& out) {
  const CharDict dict = CharDict::load(dict_path);
  const WordLexicon words = lexicon_path.empty()
                                ? WordLexicon::from_entries({}, "none")
                                : WordLexicon::load(lexicon_path, dict);
  CorpusConfig config;
  config.max_len = max_len;
  CorpusStats stats;
  const auto samples =
      build_parallel_corpus(read_documents(input), dict, words, config, stats);
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot create " + out_path);
  write_corpus(file, samples, dict);
  if (!file.flush()) throw IoError("failed writing " + out_path);
  if (!stats_path.empty()) {
    std::ofstream s(stats_path, std::ios::binary | std::ios::trunc);
    if (!s) throw IoError("cannot create " + stats_path);
    write_stats(s, stats);
  }
  write_stats(out, stats);
  return 0;
}

int run_serve(const std::string& config_path, const std::string& bind,
              std::ostream& out) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) {
    throw ConfigError("--bind expects HOST:PORT");
  }
  const std::string host = bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("bad port in --bind '" + bind + "'");
  }
  auto engine = std::make_shared<const Engine>(
      assemble_engine(EngineConfigFile::load(config_path)));
  Service service(engine);
  const int bound = service.bind(host, port);
  if (bound < 0) throw IoError("cannot bind " + bind);
  out << "listening on " << host << ':' << bound << std::endl;

  g_interrupted.store(false);
  auto previous_int = std::signal(SIGINT, on_signal);
  auto previous_term = std::signal(SIGTERM, on_signal);
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done.load()) {
      if (g_interrupted.load()) {
        service.stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
  });
  const bool ok = service.listen();
  done.store(true);
  watcher.join();
  std::signal(SIGINT, previous_int);
  std::signal(SIGTERM, previous_term);
  out << "stopped" << std::endl;
  return ok || g_interrupted.load() ? 0 : 1;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  CLI::App app{"Pinyin-to-character conversion toolkit", "p2c"};
  app.require_subcommand(1);

  // prepare-corpus
  auto* prepare =
      app.add_subcommand("prepare-corpus", "Build a pinyin/character corpus");
  std::string prep_input, prep_out, prep_dict, prep_lex, prep_stats;
  std::size_t prep_max_len = 16;
  prepare->add_option("--input", prep_input, "Directory of UTF-8 documents")
      ->required();
  prepare->add_option("--out", prep_out, "Corpus file to write")->required();
  prepare->add_option("--max-len", prep_max_len, "Maximum sample length")
      ->check(CLI::PositiveNumber);
  prepare->add_option("--char-dict", prep_dict, "Character dictionary")
      ->required();
  prepare->add_option("--word-lexicon", prep_lex,
                      "Word lexicon for polyphone readings");
  prepare->add_option("--stats", prep_stats, "Also write statistics here");

  // train-bigram
  auto* train = app.add_subcommand("train-bigram", "Count a bigram model");
  std::string train_corpus, train_out, train_dict;
  double train_lambda = NgramModel::kDefaultLambda;
  train->add_option("--corpus", train_corpus, "Parallel corpus")->required();
  train->add_option("--out", train_out, "Model file to write")->required();
  train->add_option("--char-dict", train_dict, "Character dictionary")
      ->required();
  train->add_option("--lambda", train_lambda, "Interpolation weight")
      ->check(CLI::Range(0.0, 1.0));

  // convert
  auto* conv = app.add_subcommand("convert", "Convert one pinyin sequence");
  EngineFlags conv_engine;
  conv_engine.attach(conv);
  std::string conv_pinyin;
  bool dump = false;
  bool explain = false;
  conv->add_option("--pinyin", conv_pinyin, "Space separated syllables")
      ->required();
  conv->add_flag("--dump-lattice", dump, "Print the lattice first");
  conv->add_flag("--explain", explain, "Per-node score breakdown");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score a corpus");
  EngineFlags eval_engine;
  eval_engine.attach(eval);
  std::string eval_corpus, eval_report;
  eval->add_option("--corpus", eval_corpus, "Parallel corpus")->required();
  eval->add_option("--report", eval_report, "Report file to write");

  // bench
  auto* bench = app.add_subcommand("bench", "Measure conversion latency");
  EngineFlags bench_engine;
  bench_engine.attach(bench);
  std::string bench_corpus, bench_pinyin;
  std::size_t bench_repeat = 3;
  bench->add_option("--corpus", bench_corpus, "Parallel corpus");
  bench->add_option("--pinyin", bench_pinyin, "Single input instead of a corpus");
  bench->add_option("--repeat", bench_repeat, "Passes over the input")
      ->check(CLI::PositiveNumber);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP conversion service");
  std::string serve_config, serve_bind = "127.0.0.1:8080";
  serve->add_option("--config", serve_config, "Engine config file")
      ->required();
  serve->add_option("--bind", serve_bind, "HOST:PORT");

  std::vector<const char*> argv;
  argv.push_back("p2c");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* failed = &app;
    for (const auto* sub : app.get_subcommands()) failed = sub;
    err << failed->help();
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (*prepare) {
      return run_prepare(prep_input, prep_out, prep_max_len, prep_dict,
                         prep_lex, prep_stats, out);
    }
    if (*train) {
      const CharDict dict = CharDict::load(train_dict);
      const NgramModel model = train_bigram(train_corpus, dict, train_lambda);
      model.save(train_out);
      out << "tokens=" << model.total_tokens() << '\n';
      return 0;
    }
    if (*conv) {
      const Engine engine = conv_engine.build();
      const PinyinSequence pinyin = utf8::split_ws(conv_pinyin);
      if (pinyin.empty()) throw EmptyInput("--pinyin is empty");
      const auto conversion = convert_detailed(pinyin, engine);
      if (dump) dump_lattice(out, conversion.lattice, *engine.dict);
      print_paths(out, conversion.paths, *engine.dict, explain);
      return 0;
    }
    if (*eval) {
      const Engine engine = eval_engine.build();
      const EvalReport report = evaluate(eval_corpus, engine);
      if (!eval_report.empty()) {
        std::ofstream file(eval_report, std::ios::binary | std::ios::trunc);
        if (!file) throw IoError("cannot create " + eval_report);
        write_report(file, report);
      }
      print_table(out, report, engine.describe());
      return 0;
    }
    if (*bench) {
      const Engine engine = bench_engine.build();
      std::vector<PinyinSequence> inputs;
      if (!bench_pinyin.empty()) {
        inputs.push_back(utf8::split_ws(bench_pinyin));
      } else if (!bench_corpus.empty()) {
        for (auto& line : read_corpus(bench_corpus)) {
          if (!line.pinyin.empty()) inputs.push_back(std::move(line.pinyin));
        }
      } else {
        throw ConfigError("bench needs --corpus or --pinyin");
      }
      using clock = std::chrono::steady_clock;
      std::size_t tokens = 0;
      const auto start = clock::now();
      for (std::size_t r = 0; r < bench_repeat; ++r) {
        for (const auto& p : inputs) {
          convert(p, engine, engine.k);
          tokens += p.size();
        }
      }
      const double ms =
          std::chrono::duration<double, std::milli>(clock::now() - start)
              .count();
      out << "sequences=" << inputs.size() * bench_repeat << '\n'
          << "tokens=" << tokens << '\n'
          << "total_ms=" << format_score(ms) << '\n'
          << "ms_per_token="
          << format_score(tokens ? ms / static_cast<double>(tokens) : 0.0)
          << '\n';
      return 0;
    }
    if (*serve) return run_serve(serve_config, serve_bind, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace p2c
