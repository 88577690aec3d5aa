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

// HTTP front end for the conversion engine.
//
//   POST /convert  {"pinyin": ["wo", "men"], "k": 3, "mode": "combined",
//                   "lexicons": ["places"]}
//     -> {"results": [{"surface": "我们", "score": -1.2,
//                      "nodes": [{"start": 0, "end": 1, "surface": "我",
//                                 "kind": "char"}, ...]}, ...]}
//   GET /health           -> {"status": "ok", "engine": ..., ...}
//   GET /lattice?pinyin=wo+men
//                         -> {"n": 2, "incomplete": false, "nodes": [...]}
//
// Malformed requests get 400 with {"error": {"code": ..., "message": ...}}.

#ifndef P2C_SERVICE_H_
#define P2C_SERVICE_H_

#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "p2c/engine.h"

namespace p2c {

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

nlohmann::json path_to_json(const DecodedPath& path, const CharDict& dict);

HttpReply handle_convert(const Engine& engine, std::string_view body);
HttpReply handle_health(const Engine& engine);
// `pinyin` is space, '+' or comma separated.
HttpReply handle_lattice(const Engine& engine, std::string_view pinyin);

class Service {
 public:
  explicit Service(std::shared_ptr<const Engine> engine);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Port 0 picks a free port. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace p2c

#endif  // P2C_SERVICE_H_
