// Copyright 2026 The ugcrank Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ugcrank {

// Root of every error the library throws. The CLI maps subclasses onto exit
// codes: IoError -> 2, everything else -> 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed structured text. line() is 1-based; 0 means "not line oriented".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A plug-in (extractor, model file) broke its declared shape or determinism.
class ContractError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// A metric is not defined for the given input (constant vector, no pairs).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class LeakageError : public Error {
 public:
  LeakageError(std::vector<std::string> ids)
      : Error(make_message(ids)), ids_(std::move(ids)) {}
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  static std::string make_message(const std::vector<std::string>& ids) {
    std::string msg = "train/test leakage: " + std::to_string(ids.size()) + " test id(s) also used for training:";
    for (const auto& id : ids) msg += " " + id;
    return msg;
  }
  std::vector<std::string> ids_;
};

}  // namespace ugcrank
