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

#ifndef ADMMC_LAYERS_HPP_
#define ADMMC_LAYERS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "admmc/tensor.hpp"

// Batched layer kernels. Every activation tensor carries the batch as its
// leading axis: (B, features) for dense layers and (B, C, H, W) for spatial
// ones. Convolutions and pooling use valid padding.
namespace admmc {

// (B, in) x (out, in)^T + bias -> (B, out)
Tensor dense_forward(const Tensor& input, const Tensor& weight,
                     const Tensor& bias);

struct DenseGradients {
  Tensor input;
  Tensor weight;
  Tensor bias;
};
DenseGradients dense_backward(const Tensor& input, const Tensor& weight,
                              const Tensor& grad_output,
                              bool need_input_grad = true);

// filters: (O, C, KH, KW); bias: (O) or empty for no bias.
// Output spatial size is floor((in - k) / stride) + 1.
Tensor conv2d_forward(const Tensor& input, const Tensor& filters,
                      const Tensor& bias, std::size_t stride);

struct Conv2dGradients {
  Tensor input;
  Tensor filters;
  Tensor bias;
};
Conv2dGradients conv2d_backward(const Tensor& input, const Tensor& filters,
                                const Tensor& grad_output, std::size_t stride,
                                bool need_input_grad = true);

struct MaxPoolResult {
  Tensor output;
  // Flat input offset of the winning element for each output element.
  std::vector<std::uint32_t> argmax;
};
// Ties go to the first element in row-major window order.
MaxPoolResult maxpool_forward(const Tensor& input, std::size_t window,
                              std::size_t stride);
Tensor maxpool_backward(const Shape& input_shape,
                        std::span<const std::uint32_t> argmax,
                        const Tensor& grad_output);

Tensor relu_forward(const Tensor& input);
Tensor relu_backward(const Tensor& input, const Tensor& grad_output);

// Mean softmax cross-entropy over the batch. When grad_logits is non-null it
// receives d(loss)/d(logits). Throws InputError for labels outside
// [0, classes).
double softmax_cross_entropy(const Tensor& logits,
                             std::span<const std::int32_t> labels,
                             Tensor* grad_logits);

}  // namespace admmc

#endif  // ADMMC_LAYERS_HPP_
