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

#ifndef P2C_UTF8_H_
#define P2C_UTF8_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace p2c::utf8 {

// Malformed sequences decode to U+FFFD, one per offending byte.
std::u32string decode(std::string_view text);

std::string encode(char32_t cp);
std::string encode(std::u32string_view text);

// Splits on runs of ASCII whitespace; no empty fields.
std::vector<std::string> split_ws(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace p2c::utf8

namespace p2c {

// FNV-1a, 64 bit. Used for vocabulary and payload digests in the model files.
class Fnv1a64 {
 public:
  void update(const void* data, std::size_t size);
  void update(std::string_view s) { update(s.data(), s.size()); }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

// Digests are always 16 lowercase hex digits; from_hex accepts either case.
std::string to_hex(std::uint64_t value);
std::uint64_t from_hex(std::string_view text);

}  // namespace p2c

#endif  // P2C_UTF8_H_
