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

#include "p2c/service.h"

#include <httplib.h>

#include "p2c/error.h"

namespace p2c {
namespace {

using json = nlohmann::json;

HttpReply bad_request(std::string_view code, const std::string& message) {
  return {400, {{"error", {{"code", code}, {"message", message}}}}};
}

json node_to_json(const LatticeNode& node, const CharDict& dict) {
  return {{"start", node.start},
          {"end", node.end},
          {"surface", dict.surface(node.surface)},
          {"kind", to_string(node.kind)}};
}

}  // namespace

json path_to_json(const DecodedPath& path, const CharDict& dict) {
  json nodes = json::array();
  for (const auto& node : path.nodes) nodes.push_back(node_to_json(node, dict));
  return {{"surface", dict.surface(path.surface)},
          {"score", path.score},
          {"nodes", std::move(nodes)}};
}

HttpReply handle_convert(const Engine& engine, std::string_view body) {
  json request;
  try {
    request = json::parse(body);
  } catch (const json::exception& e) {
    return bad_request("invalid_json", e.what());
  }
  if (!request.is_object()) {
    return bad_request("invalid_request", "body must be a JSON object");
  }
  if (!request.contains("pinyin") || !request["pinyin"].is_array()) {
    return bad_request("invalid_request", "'pinyin' must be an array");
  }
  PinyinSequence pinyin;
  for (const auto& s : request["pinyin"]) {
    if (!s.is_string()) {
      return bad_request("invalid_request", "'pinyin' entries must be strings");
    }
    pinyin.push_back(s.get<std::string>());
  }
  if (pinyin.empty()) return bad_request("empty_input", "'pinyin' is empty");

  ConvertOptions options;
  if (request.contains("k")) {
    const auto& k = request["k"];
    if (!k.is_number_integer() || k.get<long long>() < 1) {
      return bad_request("invalid_request", "'k' must be a positive integer");
    }
    options.k = k.get<std::size_t>();
  }
  if (request.contains("mode")) {
    if (!request["mode"].is_string()) {
      return bad_request("invalid_request", "'mode' must be a string");
    }
    try {
      options.mode = parse_mode(request["mode"].get<std::string>());
    } catch (const ConfigError& e) {
      return bad_request("invalid_mode", e.what());
    }
  }
  if (request.contains("lexicons")) {
    if (!request["lexicons"].is_array()) {
      return bad_request("invalid_request", "'lexicons' must be an array");
    }
    std::vector<std::string> names;
    for (const auto& n : request["lexicons"]) {
      if (!n.is_string()) {
        return bad_request("invalid_request",
                           "'lexicons' entries must be strings");
      }
      names.push_back(n.get<std::string>());
    }
    options.lexicons = std::move(names);
  }

  try {
    const auto conversion = convert_detailed(pinyin, engine, options);
    json results = json::array();
    for (const auto& path : conversion.paths) {
      results.push_back(path_to_json(path, *engine.dict));
    }
    return {200, {{"results", std::move(results)}}};
  } catch (const SequenceTooLong& e) {
    return bad_request("too_long", e.what());
  } catch (const ConfigError& e) {
    return bad_request("invalid_request", e.what());
  } catch (const ModeError& e) {
    return bad_request("invalid_mode", e.what());
  } catch (const Error& e) {
    return {500, {{"error", {{"code", "internal"}, {"message", e.what()}}}}};
  }
}

HttpReply handle_health(const Engine& engine) {
  json lexicons = json::array();
  for (const auto& lex : engine.lexicons) {
    lexicons.push_back({{"name", lex->name()}, {"entries", lex->size()}});
  }
  return {200,
          {{"status", "ok"},
           {"engine", engine.describe()},
           {"mode", to_string(engine.score.mode)},
           {"k", engine.k},
           {"lambda_emit", engine.score.lambda_emit},
           {"lambda_trans", engine.score.lambda_trans},
           {"emission_floor", engine.score.emission_floor},
           {"max_len", engine.emission ? engine.emission->max_len() : 0},
           {"lexicons", std::move(lexicons)}}};
}

HttpReply handle_lattice(const Engine& engine, std::string_view text) {
  PinyinSequence pinyin;
  std::string current;
  for (char c : text) {
    if (c == ' ' || c == '+' || c == ',') {
      if (!current.empty()) pinyin.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) pinyin.push_back(std::move(current));
  if (pinyin.empty()) return bad_request("empty_input", "'pinyin' is empty");
  const Lattice lattice = engine_lattice(pinyin, engine);
  json nodes = json::array();
  for (const auto& node : lattice.nodes()) {
    nodes.push_back(node_to_json(node, *engine.dict));
  }
  return {200,
          {{"n", lattice.size()},
           {"incomplete", lattice.incomplete()},
           {"pinyin", pinyin},
           {"nodes", std::move(nodes)}}};
}

struct Service::Impl {
  std::shared_ptr<const Engine> engine;
  httplib::Server server;
};

Service::Service(std::shared_ptr<const Engine> engine)
    : impl_(std::make_unique<Impl>()) {
  impl_->engine = std::move(engine);
  auto& server = impl_->server;
  const Engine* e = impl_->engine.get();
  const auto send = [](httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json; charset=utf-8");
    res.set_header("Access-Control-Allow-Origin", "*");
  };
  server.Post("/convert", [e, send](const httplib::Request& req,
                                    httplib::Response& res) {
    send(res, handle_convert(*e, req.body));
  });
  server.Get("/health", [e, send](const httplib::Request&,
                                  httplib::Response& res) {
    send(res, handle_health(*e));
  });
  server.Get("/lattice", [e, send](const httplib::Request& req,
                                   httplib::Response& res) {
    send(res, handle_lattice(*e, req.get_param_value("pinyin")));
  });
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool Service::listen() { return impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace p2c
