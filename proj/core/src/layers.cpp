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

#include "admmc/layers.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "admmc/error.hpp"

namespace admmc {
namespace {

using RowMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using VectorMap = Eigen::Map<Eigen::RowVectorXf>;
using ConstVectorMap = Eigen::Map<const Eigen::RowVectorXf>;

struct SpatialDims {
  std::size_t batch, channels, height, width;
};

SpatialDims spatial_dims(const Tensor& t, const char* what) {
  if (t.rank() != 4) {
    throw ConfigError(std::string(what) + ": expected (B, C, H, W), got " +
                      shape_to_string(t.shape()));
  }
  return {t.dim(0), t.dim(1), t.dim(2), t.dim(3)};
}

// Unfolds one (C, H, W) sample into a (C*KH*KW, OH*OW) column matrix.
void im2col(const float* image, std::size_t channels, std::size_t height,
            std::size_t width, std::size_t kh, std::size_t kw,
            std::size_t stride, std::size_t oh, std::size_t ow, float* cols) {
  const std::size_t positions = oh * ow;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < kh; ++i) {
      for (std::size_t j = 0; j < kw; ++j) {
        float* row = cols + ((c * kh + i) * kw + j) * positions;
        for (std::size_t y = 0; y < oh; ++y) {
          const float* src = image + (c * height + y * stride + i) * width + j;
          for (std::size_t x = 0; x < ow; ++x) row[y * ow + x] = src[x * stride];
        }
      }
    }
  }
}

void col2im(const float* cols, std::size_t channels, std::size_t height,
            std::size_t width, std::size_t kh, std::size_t kw,
            std::size_t stride, std::size_t oh, std::size_t ow, float* image) {
  const std::size_t positions = oh * ow;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < kh; ++i) {
      for (std::size_t j = 0; j < kw; ++j) {
        const float* row = cols + ((c * kh + i) * kw + j) * positions;
        for (std::size_t y = 0; y < oh; ++y) {
          float* dst = image + (c * height + y * stride + i) * width + j;
          for (std::size_t x = 0; x < ow; ++x) dst[x * stride] += row[y * ow + x];
        }
      }
    }
  }
}

std::size_t output_extent(std::size_t in, std::size_t k, std::size_t stride,
                          const char* what) {
  if (stride == 0) throw ConfigError(std::string(what) + ": stride must be >= 1");
  if (k == 0 || k > in) {
    throw ConfigError(std::string(what) + ": window " + std::to_string(k) +
                      " does not fit input extent " + std::to_string(in));
  }
  return (in - k) / stride + 1;
}

}  // namespace

Tensor dense_forward(const Tensor& input, const Tensor& weight,
                     const Tensor& bias) {
  if (input.rank() != 2 || weight.rank() != 2 || input.dim(1) != weight.dim(1)) {
    throw ConfigError("dense: input " + shape_to_string(input.shape()) +
                      " incompatible with weight " +
                      shape_to_string(weight.shape()));
  }
  const std::size_t batch = input.dim(0), in = weight.dim(1), out = weight.dim(0);
  if (!bias.empty() && bias.numel() != out) {
    throw ConfigError("dense: bias length " + std::to_string(bias.numel()) +
                      " != fan-out " + std::to_string(out));
  }
  Tensor output({batch, out});
  ConstMatrixMap x(input.data().data(), batch, in);
  ConstMatrixMap w(weight.data().data(), out, in);
  MatrixMap y(output.data().data(), batch, out);
  y.noalias() = x * w.transpose();
  if (!bias.empty()) {
    y.rowwise() += ConstVectorMap(bias.data().data(), out);
  }
  return output;
}

DenseGradients dense_backward(const Tensor& input, const Tensor& weight,
                              const Tensor& grad_output, bool need_input_grad) {
  const std::size_t batch = input.dim(0), in = weight.dim(1), out = weight.dim(0);
  if (grad_output.rank() != 2 || grad_output.dim(0) != batch ||
      grad_output.dim(1) != out) {
    throw ConfigError("dense backward: gradient shape " +
                      shape_to_string(grad_output.shape()) + " mismatch");
  }
  DenseGradients grads{Tensor(), Tensor({out, in}), Tensor({out})};
  ConstMatrixMap x(input.data().data(), batch, in);
  ConstMatrixMap w(weight.data().data(), out, in);
  ConstMatrixMap dy(grad_output.data().data(), batch, out);
  MatrixMap(grads.weight.data().data(), out, in).noalias() = dy.transpose() * x;
  // Fixed summation order: Eigen's vectorized reductions depend on pointer
  // alignment, which would make bias gradients vary between calls.
  const float* g = grad_output.data().data();
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t o = 0; o < out; ++o) grads.bias[o] += g[i * out + o];
  }
  if (need_input_grad) {
    grads.input = Tensor({batch, in});
    MatrixMap(grads.input.data().data(), batch, in).noalias() = dy * w;
  }
  return grads;
}

Tensor conv2d_forward(const Tensor& input, const Tensor& filters,
                      const Tensor& bias, std::size_t stride) {
  const SpatialDims d = spatial_dims(input, "conv2d");
  if (filters.rank() != 4 || filters.dim(1) != d.channels) {
    throw ConfigError("conv2d: filters " + shape_to_string(filters.shape()) +
                      " incompatible with input " +
                      shape_to_string(input.shape()));
  }
  const std::size_t out_c = filters.dim(0), kh = filters.dim(2), kw = filters.dim(3);
  const std::size_t oh = output_extent(d.height, kh, stride, "conv2d");
  const std::size_t ow = output_extent(d.width, kw, stride, "conv2d");
  if (!bias.empty() && bias.numel() != out_c) {
    throw ConfigError("conv2d: bias length mismatch");
  }
  const std::size_t patch = d.channels * kh * kw, positions = oh * ow;
  Tensor output({d.batch, out_c, oh, ow});
  std::vector<float> cols(patch * positions);
  ConstMatrixMap w(filters.data().data(), out_c, patch);
  ConstMatrixMap c(cols.data(), patch, positions);
  const std::size_t in_stride = d.channels * d.height * d.width;
  for (std::size_t b = 0; b < d.batch; ++b) {
    im2col(input.data().data() + b * in_stride, d.channels, d.height, d.width,
           kh, kw, stride, oh, ow, cols.data());
    MatrixMap y(output.data().data() + b * out_c * positions, out_c, positions);
    y.noalias() = w * c;
    if (!bias.empty()) {
      for (std::size_t o = 0; o < out_c; ++o) y.row(o).array() += bias[o];
    }
  }
  return output;
}

Conv2dGradients conv2d_backward(const Tensor& input, const Tensor& filters,
                                const Tensor& grad_output, std::size_t stride,
                                bool need_input_grad) {
  const SpatialDims d = spatial_dims(input, "conv2d backward");
  const std::size_t out_c = filters.dim(0), kh = filters.dim(2), kw = filters.dim(3);
  const std::size_t oh = output_extent(d.height, kh, stride, "conv2d backward");
  const std::size_t ow = output_extent(d.width, kw, stride, "conv2d backward");
  if (grad_output.shape() != Shape{d.batch, out_c, oh, ow}) {
    throw ConfigError("conv2d backward: gradient shape " +
                      shape_to_string(grad_output.shape()) + " mismatch");
  }
  const std::size_t patch = d.channels * kh * kw, positions = oh * ow;
  Conv2dGradients grads{Tensor(), Tensor(filters.shape()), Tensor({out_c})};
  if (need_input_grad) grads.input = Tensor(input.shape());

  std::vector<float> cols(patch * positions);
  std::vector<float> dcols(need_input_grad ? patch * positions : 0);
  ConstMatrixMap w(filters.data().data(), out_c, patch);
  MatrixMap dw(grads.filters.data().data(), out_c, patch);
  const std::size_t in_stride = d.channels * d.height * d.width;
  for (std::size_t b = 0; b < d.batch; ++b) {
    im2col(input.data().data() + b * in_stride, d.channels, d.height, d.width,
           kh, kw, stride, oh, ow, cols.data());
    ConstMatrixMap dy(grad_output.data().data() + b * out_c * positions, out_c,
                      positions);
    dw.noalias() += dy * ConstMatrixMap(cols.data(), patch, positions).transpose();
    for (std::size_t o = 0; o < out_c; ++o) {
      const float* row = grad_output.data().data() + (b * out_c + o) * positions;
      float sum = 0.0f;
      for (std::size_t p = 0; p < positions; ++p) sum += row[p];
      grads.bias[o] += sum;
    }
    if (need_input_grad) {
      MatrixMap(dcols.data(), patch, positions).noalias() = w.transpose() * dy;
      col2im(dcols.data(), d.channels, d.height, d.width, kh, kw, stride, oh,
             ow, grads.input.data().data() + b * in_stride);
    }
  }
  return grads;
}

MaxPoolResult maxpool_forward(const Tensor& input, std::size_t window,
                              std::size_t stride) {
  const SpatialDims d = spatial_dims(input, "maxpool");
  const std::size_t oh = output_extent(d.height, window, stride, "maxpool");
  const std::size_t ow = output_extent(d.width, window, stride, "maxpool");
  MaxPoolResult result{Tensor({d.batch, d.channels, oh, ow}), {}};
  result.argmax.resize(result.output.numel());
  const auto in = input.data();
  std::size_t out_index = 0;
  for (std::size_t plane = 0; plane < d.batch * d.channels; ++plane) {
    const std::size_t base = plane * d.height * d.width;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x, ++out_index) {
        std::size_t best = base + (y * stride) * d.width + x * stride;
        for (std::size_t i = 0; i < window; ++i) {
          for (std::size_t j = 0; j < window; ++j) {
            const std::size_t at = base + (y * stride + i) * d.width + x * stride + j;
            if (in[at] > in[best]) best = at;
          }
        }
        result.output[out_index] = in[best];
        result.argmax[out_index] = static_cast<std::uint32_t>(best);
      }
    }
  }
  return result;
}

Tensor maxpool_backward(const Shape& input_shape,
                        std::span<const std::uint32_t> argmax,
                        const Tensor& grad_output) {
  if (argmax.size() != grad_output.numel()) {
    throw ConfigError("maxpool backward: argmax/gradient size mismatch");
  }
  Tensor grad(input_shape);
  for (std::size_t i = 0; i < argmax.size(); ++i) grad[argmax[i]] += grad_output[i];
  return grad;
}

Tensor relu_forward(const Tensor& input) {
  Tensor out = input;
  for (float& v : out.data()) v = v > 0.0f ? v : 0.0f;
  return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_output) {
  require_same_shape(input, grad_output, "relu backward");
  Tensor grad(input.shape());
  for (std::size_t i = 0; i < input.numel(); ++i) {
    grad[i] = input[i] > 0.0f ? grad_output[i] : 0.0f;
  }
  return grad;
}

double softmax_cross_entropy(const Tensor& logits,
                             std::span<const std::int32_t> labels,
                             Tensor* grad_logits) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
    throw ConfigError("loss: logits " + shape_to_string(logits.shape()) +
                      " do not match " + std::to_string(labels.size()) +
                      " labels");
  }
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  if (grad_logits) *grad_logits = Tensor(logits.shape());
  if (batch == 0) return 0.0;
  double total = 0.0;
  std::vector<double> probs(classes);
  for (std::size_t b = 0; b < batch; ++b) {
    const std::int32_t label = labels[b];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw InputError("label " + std::to_string(label) + " outside [0, " +
                       std::to_string(classes) + ")");
    }
    const float* row = logits.data().data() + b * classes;
    const double peak = *std::max_element(row, row + classes);
    double denom = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      probs[c] = std::exp(static_cast<double>(row[c]) - peak);
      denom += probs[c];
    }
    const double log_denom = std::log(denom);
    total += std::max(0.0, log_denom - (static_cast<double>(row[label]) - peak));
    if (grad_logits) {
      float* g = grad_logits->data().data() + b * classes;
      for (std::size_t c = 0; c < classes; ++c) {
        const double p = probs[c] / denom - (c == static_cast<std::size_t>(label));
        g[c] = static_cast<float>(p / static_cast<double>(batch));
      }
    }
  }
  return total / static_cast<double>(batch);
}

}  // namespace admmc
