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

#ifndef ADMMC_TENSOR_HPP_
#define ADMMC_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace admmc {

using Shape = std::vector<std::size_t>;

// Binary keep/drop flag per weight; 1 marks a surviving entry.
using Mask = std::vector<std::uint8_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

// Dense row-major array of 32-bit reals.
//
// Invariant: shape_numel(shape()) == data().size().
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> values);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t numel() const noexcept { return values_.size(); }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<float> data() noexcept { return values_; }
  std::span<const float> data() const noexcept { return values_; }
  const std::vector<float>& values() const noexcept { return values_; }

  float& operator[](std::size_t i) noexcept { return values_[i]; }
  float operator[](std::size_t i) const noexcept { return values_[i]; }

  void fill(float value);
  // Reinterprets the buffer under a new shape of identical element count.
  void reshape(Shape shape);

  bool all_finite() const noexcept;
  std::size_t count_nonzero() const noexcept;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<float> values_;
};

// Squared Frobenius norms, accumulated in double.
double squared_norm(std::span<const float> a);
double squared_distance(std::span<const float> a, std::span<const float> b);

// Bitwise equality (distinguishes -0.0f from 0.0f, NaN payloads, ...).
bool bitwise_equal(std::span<const float> a, std::span<const float> b);

// Throws ConfigError when the shapes differ.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

Mask mask_of_nonzero(std::span<const float> values);
std::size_t count_ones(const Mask& mask);

}  // namespace admmc

#endif  // ADMMC_TENSOR_HPP_
