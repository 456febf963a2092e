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

#ifndef ADMMC_NETWORK_HPP_
#define ADMMC_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "admmc/tensor.hpp"

namespace admmc {

enum class LayerKind : std::uint8_t {
  kDense = 0,
  kConv2d = 1,
  kMaxPool = 2,
  kRelu = 3,
  kFlatten = 4,
};

std::string to_string(LayerKind kind);

// One stage of a feed-forward network.
//
//   dense:   in = fan-in, out = fan-out
//   conv2d:  in/out = channels, kernel = square filter side, stride
//   maxpool: kernel = square window side, stride
struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;

  static LayerSpec dense(std::size_t in, std::size_t out);
  static LayerSpec conv2d(std::size_t in_channels, std::size_t out_channels,
                          std::size_t kernel, std::size_t stride = 1);
  static LayerSpec maxpool(std::size_t window, std::size_t stride);
  static LayerSpec relu();
  static LayerSpec flatten();

  bool trainable() const noexcept {
    return kind == LayerKind::kDense || kind == LayerKind::kConv2d;
  }
  Shape weight_shape() const;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct LayerParams {
  Tensor weight;
  Tensor bias;

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

using ParamList = std::vector<LayerParams>;

ParamList zeros_like(const ParamList& params);

// A fixed feed-forward stack trained with explicit per-layer backprop.
class Network {
 public:
  Network() = default;
  // Validates that consecutive layer shapes compose; parameters start at 0.
  Network(Shape input_shape, std::vector<LayerSpec> layers);

  // He-uniform weights (limit sqrt(6 / fan_in)), zero biases.
  void init_he_uniform(std::uint64_t seed);

  const Shape& input_shape() const noexcept { return input_shape_; }
  const Shape& output_shape() const noexcept { return shapes_.back(); }
  std::size_t class_count() const;
  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }

  // Parameters of the trainable layers (dense/conv2d), in layer order.
  ParamList& params() noexcept { return params_; }
  const ParamList& params() const noexcept { return params_; }
  std::size_t trainable_count() const noexcept { return params_.size(); }
  std::size_t weight_count() const noexcept;

  struct Cache {
    std::vector<Tensor> inputs;  // input of every layer
    std::vector<std::vector<std::uint32_t>> argmax;
  };

  // batch: (B, input_shape...). Returns logits (B, classes).
  Tensor forward(const Tensor& batch, Cache* cache = nullptr) const;

  // Mean softmax cross-entropy and its gradients; grads is resized to match
  // params().
  double loss_and_grads(const Tensor& batch,
                        std::span<const std::int32_t> labels,
                        ParamList& grads) const;

  std::vector<std::int32_t> predict(const Tensor& batch) const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  Shape input_shape_;
  std::vector<LayerSpec> layers_;
  std::vector<Shape> shapes_;  // shapes_[k] = per-sample input shape of layer k
  std::vector<std::size_t> param_slot_;  // layer -> params_ index (or npos)
  ParamList params_;
};

// 784-300-100-10 style ReLU perceptron on flattened input.
Network make_mlp(std::size_t inputs, std::span<const std::size_t> hidden,
                 std::size_t classes);
// Caffe-style LeNet-5: conv5x5(20) pool conv5x5(50) pool fc500 fc10.
Network make_lenet5(std::size_t classes = 10);

}  // namespace admmc

#endif  // ADMMC_NETWORK_HPP_
