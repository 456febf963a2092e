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

#include "admmc/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "admmc/error.hpp"
#include "admmc/layers.hpp"

namespace admmc {
namespace {

constexpr std::size_t kNoSlot = std::numeric_limits<std::size_t>::max();

Shape batched(std::size_t batch, const Shape& sample) {
  Shape shape{batch};
  shape.insert(shape.end(), sample.begin(), sample.end());
  return shape;
}

Shape infer_output(const LayerSpec& layer, const Shape& in, std::size_t index) {
  const std::string where = "layer " + std::to_string(index) + " (" +
                            to_string(layer.kind) + "): ";
  switch (layer.kind) {
    case LayerKind::kDense:
      if (in.size() != 1 || in[0] != layer.in || layer.out == 0) {
        throw ConfigError(where + "expects (" + std::to_string(layer.in) +
                          ") input, got " + shape_to_string(in));
      }
      return {layer.out};
    case LayerKind::kConv2d:
    case LayerKind::kMaxPool: {
      if (in.size() != 3) {
        throw ConfigError(where + "expects (C, H, W) input, got " +
                          shape_to_string(in));
      }
      const bool conv = layer.kind == LayerKind::kConv2d;
      if (conv && (in[0] != layer.in || layer.out == 0)) {
        throw ConfigError(where + "expects " + std::to_string(layer.in) +
                          " channels, got " + shape_to_string(in));
      }
      if (layer.stride == 0 || layer.kernel == 0 || layer.kernel > in[1] ||
          layer.kernel > in[2]) {
        throw ConfigError(where + "window " + std::to_string(layer.kernel) +
                          " / stride " + std::to_string(layer.stride) +
                          " invalid for input " + shape_to_string(in));
      }
      return {conv ? layer.out : in[0], (in[1] - layer.kernel) / layer.stride + 1,
              (in[2] - layer.kernel) / layer.stride + 1};
    }
    case LayerKind::kRelu:
      return in;
    case LayerKind::kFlatten:
      return {shape_numel(in)};
  }
  throw ConfigError(where + "unknown layer kind");
}

}  // namespace

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kDense: return "dense";
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kMaxPool: return "maxpool";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kFlatten: return "flatten";
  }
  return "unknown";
}

LayerSpec LayerSpec::dense(std::size_t in, std::size_t out) {
  return {LayerKind::kDense, in, out, 0, 1};
}
LayerSpec LayerSpec::conv2d(std::size_t in_channels, std::size_t out_channels,
                            std::size_t kernel, std::size_t stride) {
  return {LayerKind::kConv2d, in_channels, out_channels, kernel, stride};
}
LayerSpec LayerSpec::maxpool(std::size_t window, std::size_t stride) {
  return {LayerKind::kMaxPool, 0, 0, window, stride};
}
LayerSpec LayerSpec::relu() { return {LayerKind::kRelu, 0, 0, 0, 1}; }
LayerSpec LayerSpec::flatten() { return {LayerKind::kFlatten, 0, 0, 0, 1}; }

Shape LayerSpec::weight_shape() const {
  switch (kind) {
    case LayerKind::kDense: return {out, in};
    case LayerKind::kConv2d: return {out, in, kernel, kernel};
    default: return {};
  }
}

ParamList zeros_like(const ParamList& params) {
  ParamList zeros;
  zeros.reserve(params.size());
  for (const auto& p : params) {
    zeros.push_back({Tensor(p.weight.shape()), Tensor(p.bias.shape())});
  }
  return zeros;
}

Network::Network(Shape input_shape, std::vector<LayerSpec> layers)
    : input_shape_(std::move(input_shape)), layers_(std::move(layers)) {
  shapes_.push_back(input_shape_);
  param_slot_.assign(layers_.size(), kNoSlot);
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    shapes_.push_back(infer_output(layers_[k], shapes_.back(), k));
    if (layers_[k].trainable()) {
      param_slot_[k] = params_.size();
      params_.push_back({Tensor(layers_[k].weight_shape()), Tensor({layers_[k].out})});
    }
  }
}

void Network::init_he_uniform(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    if (param_slot_[k] == kNoSlot) continue;
    LayerParams& p = params_[param_slot_[k]];
    const std::size_t fan_in = p.weight.numel() / p.weight.dim(0);
    const float limit = std::sqrt(6.0f / static_cast<float>(fan_in));
    std::uniform_real_distribution<float> dist(-limit, limit);
    for (float& w : p.weight.data()) w = dist(rng);
    p.bias.fill(0.0f);
  }
}

std::size_t Network::class_count() const {
  const Shape& out = output_shape();
  return out.size() == 1 ? out[0] : shape_numel(out);
}

std::size_t Network::weight_count() const noexcept {
  std::size_t total = 0;
  for (const auto& p : params_) total += p.weight.numel();
  return total;
}

Tensor Network::forward(const Tensor& batch, Cache* cache) const {
  if (batch.rank() != input_shape_.size() + 1 ||
      !std::equal(input_shape_.begin(), input_shape_.end(),
                  batch.shape().begin() + 1)) {
    throw ConfigError("network input " + shape_to_string(batch.shape()) +
                      " does not match (B, " +
                      shape_to_string(input_shape_).substr(1));
  }
  const std::size_t b = batch.dim(0);
  if (cache) {
    cache->inputs.clear();
    cache->argmax.assign(layers_.size(), {});
  }
  Tensor x = batch;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const LayerSpec& layer = layers_[k];
    Tensor y;
    switch (layer.kind) {
      case LayerKind::kDense: {
        const LayerParams& p = params_[param_slot_[k]];
        y = dense_forward(x, p.weight, p.bias);
        break;
      }
      case LayerKind::kConv2d: {
        const LayerParams& p = params_[param_slot_[k]];
        y = conv2d_forward(x, p.weight, p.bias, layer.stride);
        break;
      }
      case LayerKind::kMaxPool: {
        MaxPoolResult pooled = maxpool_forward(x, layer.kernel, layer.stride);
        y = std::move(pooled.output);
        if (cache) cache->argmax[k] = std::move(pooled.argmax);
        break;
      }
      case LayerKind::kRelu:
        y = relu_forward(x);
        break;
      case LayerKind::kFlatten:
        y = x;
        y.reshape(batched(b, shapes_[k + 1]));
        break;
    }
    if (cache) {
      cache->inputs.push_back(std::move(x));
    }
    x = std::move(y);
  }
  return x;
}

double Network::loss_and_grads(const Tensor& batch,
                               std::span<const std::int32_t> labels,
                               ParamList& grads) const {
  Cache cache;
  const Tensor logits = forward(batch, &cache);
  Tensor grad;
  const double loss = softmax_cross_entropy(logits, labels, &grad);
  grads.resize(params_.size());
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const LayerSpec& layer = layers_[k];
    const Tensor& input = cache.inputs[k];
    // The first layer never needs its input gradient.
    const bool need_input = k > 0;
    switch (layer.kind) {
      case LayerKind::kDense: {
        const std::size_t slot = param_slot_[k];
        DenseGradients g = dense_backward(input, params_[slot].weight, grad, need_input);
        grads[slot] = {std::move(g.weight), std::move(g.bias)};
        grad = std::move(g.input);
        break;
      }
      case LayerKind::kConv2d: {
        const std::size_t slot = param_slot_[k];
        Conv2dGradients g = conv2d_backward(input, params_[slot].weight, grad,
                                            layer.stride, need_input);
        grads[slot] = {std::move(g.filters), std::move(g.bias)};
        grad = std::move(g.input);
        break;
      }
      case LayerKind::kMaxPool:
        grad = maxpool_backward(input.shape(), cache.argmax[k], grad);
        break;
      case LayerKind::kRelu:
        grad = relu_backward(input, grad);
        break;
      case LayerKind::kFlatten:
        grad.reshape(input.shape());
        break;
    }
    if (!need_input) break;
  }
  return loss;
}

std::vector<std::int32_t> Network::predict(const Tensor& batch) const {
  const Tensor logits = forward(batch);
  const std::size_t n = logits.dim(0), classes = logits.dim(1);
  std::vector<std::int32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const float* row = logits.data().data() + i * classes;
    labels[i] = static_cast<std::int32_t>(std::max_element(row, row + classes) - row);
  }
  return labels;
}

Network make_mlp(std::size_t inputs, std::span<const std::size_t> hidden,
                 std::size_t classes) {
  std::vector<LayerSpec> layers;
  std::size_t width = inputs;
  for (std::size_t h : hidden) {
    layers.push_back(LayerSpec::dense(width, h));
    layers.push_back(LayerSpec::relu());
    width = h;
  }
  layers.push_back(LayerSpec::dense(width, classes));
  return Network({inputs}, std::move(layers));
}

Network make_lenet5(std::size_t classes) {
  return Network({1, 28, 28}, {
                                  LayerSpec::conv2d(1, 20, 5),
                                  LayerSpec::relu(),
                                  LayerSpec::maxpool(2, 2),
                                  LayerSpec::conv2d(20, 50, 5),
                                  LayerSpec::relu(),
                                  LayerSpec::maxpool(2, 2),
                                  LayerSpec::flatten(),
                                  LayerSpec::dense(800, 500),
                                  LayerSpec::relu(),
                                  LayerSpec::dense(500, classes),
                              });
}

}  // namespace admmc
