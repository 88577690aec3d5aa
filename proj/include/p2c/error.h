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

#ifndef P2C_ERROR_H_
#define P2C_ERROR_H_

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace p2c {

// Base of every error the library throws. Callers that only need a
// diagnostic catch this; tests catch the concrete types.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define P2C_DEFINE_ERROR(Name)              \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

P2C_DEFINE_ERROR(EmptyDictionary);
P2C_DEFINE_ERROR(DuplicateSyllable);
P2C_DEFINE_ERROR(FormatError);
P2C_DEFINE_ERROR(ChecksumMismatch);
P2C_DEFINE_ERROR(VocabMismatch);
P2C_DEFINE_ERROR(EmptyInput);
P2C_DEFINE_ERROR(ModeError);
P2C_DEFINE_ERROR(NoPath);
P2C_DEFINE_ERROR(TooManyPaths);
P2C_DEFINE_ERROR(LengthMismatch);
P2C_DEFINE_ERROR(SequenceTooLong);
P2C_DEFINE_ERROR(InvalidTokenId);
P2C_DEFINE_ERROR(ConfigError);
P2C_DEFINE_ERROR(IoError);

#undef P2C_DEFINE_ERROR

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ShapeMismatch : public Error {
 public:
  ShapeMismatch(const std::string& tensor, const std::string& expected,
                const std::string& found)
      : Error("tensor " + tensor + ": expected shape " + expected +
              ", found " + found),
        tensor_(tensor) {}
  const std::string& tensor() const { return tensor_; }

 private:
  std::string tensor_;
};

class CharNotInDictionary : public Error {
 public:
  CharNotInDictionary(char32_t ch, std::size_t position)
      : Error("character U+" + hex(ch) + " at position " +
              std::to_string(position) + " has no reading"),
        ch_(ch),
        position_(position) {}
  char32_t ch() const { return ch_; }
  std::size_t position() const { return position_; }

 private:
  static std::string hex(char32_t c) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04X", static_cast<unsigned>(c));
    return buf;
  }

  char32_t ch_;
  std::size_t position_;
};

}  // namespace p2c

#endif  // P2C_ERROR_H_
