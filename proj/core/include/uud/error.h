// Copyright 2026 The uudiscover Authors
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

#ifndef UUD_ERROR_H_
#define UUD_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uud {

// Base of every error thrown by the library. Module errors carry a message
// that the CLI prints verbatim before exiting non-zero.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line()` is 1-based and 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a domain invariant (range, uniqueness).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or unsupported configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Filtering produced no instances; downstream stages need N >= 1.
class EmptySearchSpaceError : public Error {
 public:
  EmptySearchSpaceError() : Error("empty search space") {}
};

}  // namespace uud

#endif  // UUD_ERROR_H_
