// Copyright 2026 The yolodesk Authors. All Rights Reserved.
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

#ifndef YOLODESK_ERROR_H_
#define YOLODESK_ERROR_H_

#include <stdexcept>
#include <string>

namespace yolodesk {

// Dimension or layout disagreement between tensors, layers or boxes.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input. `line()` is 1-based, or 0 when the error is not tied
// to a particular line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// Well-formed input carrying a value outside its allowed range.
class RangeError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Binary payload that is not in a supported format, or is truncated.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace yolodesk

#endif  // YOLODESK_ERROR_H_
