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

#ifndef P2C_CLI_H_
#define P2C_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace p2c {

// Subcommands: prepare-corpus, train-bigram, convert, evaluate, bench, serve.
// Returns the process exit code; diagnostics go to `err`.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err);

}  // namespace p2c

#endif  // P2C_CLI_H_
