// Copyright 2026 The admmc Authors
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

#ifndef ADMMC_ERROR_HPP_
#define ADMMC_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace admmc {

// Base of every exception thrown by the library. The category lets the CLI
// map failures onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  enum class Category {
    kConfig,       // shape mismatch, invalid parameters, schema violations
    kInput,        // bad caller-supplied values (labels out of range, ...)
    kIo,           // missing or truncated files
    kFormat,       // malformed byte streams
    kConsistency,  // mutually inconsistent inputs
    kDivergence,   // non-finite loss during training
    kExactness,    // weights not on their codebook
    kDegenerate,   // input admits no meaningful answer
  };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(Category::kConfig, what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what)
      : Error(Category::kInput, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(Category::kIo, what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error(Category::kFormat, what) {}
};

class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& what)
      : Error(Category::kConsistency, what) {}
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& phase, std::size_t iteration)
      : Error(Category::kDivergence,
              "non-finite loss during " + phase + " at iteration " +
                  std::to_string(iteration)),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class ExactnessError : public Error {
 public:
  explicit ExactnessError(const std::string& what)
      : Error(Category::kExactness, what) {}
};

class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what)
      : Error(Category::kDegenerate, what) {}
};

}  // namespace admmc

#endif  // ADMMC_ERROR_HPP_
