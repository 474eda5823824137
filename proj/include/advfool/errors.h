//
// Copyright 2026 The advfool Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#ifndef ADVFOOL_ERRORS_H_
#define ADVFOOL_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace advfool {

// Root of every error the library throws on bad input or numeric failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("empty input after trimming") {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class LabelRange : public Error {
 public:
  LabelRange(std::size_t line, int label, int num_classes)
      : Error("line " + std::to_string(line) + ": label " +
              std::to_string(label) + " outside [0, " +
              std::to_string(num_classes) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ModelShape : public Error {
 public:
  using Error::Error;
};

class NumericOverflow : public Error {
 public:
  using Error::Error;
};

class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

class LayerIndex : public Error {
 public:
  LayerIndex(int index, int max_index)
      : Error("layer index " + std::to_string(index) + " outside [0, " +
              std::to_string(max_index) + "]") {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class BudgetExhausted : public Error {
 public:
  explicit BudgetExhausted(std::size_t budget)
      : Error("query budget of " + std::to_string(budget) + " exhausted") {}
};

}  // namespace advfool

#endif  // ADVFOOL_ERRORS_H_
