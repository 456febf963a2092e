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


#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "admmc/network.hpp"
#include "admmc/tensor.hpp"

namespace admmc {
namespace {

Tensor images(std::size_t batch, const Shape& sample, std::uint64_t seed) {
  Shape shape{batch};
  shape.insert(shape.end(), sample.begin(), sample.end());
  Tensor t(shape);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (float& x : t.data()) x = u(rng);
  return t;
}

std::vector<std::int32_t> labels(std::size_t batch) {
  std::vector<std::int32_t> out(batch);
  for (std::size_t i = 0; i < batch; ++i) out[i] = static_cast<std::int32_t>(i % 10);
  return out;
}

Network mlp() {
  std::vector<std::size_t> hidden{300, 100};
  Network net = make_mlp(784, hidden, 10);
  net.init_he_uniform(1);
  return net;
}

void BM_MlpForward(benchmark::State& state) {
  const Network net = mlp();
  const std::size_t b = static_cast<std::size_t>(state.range(0));
  const Tensor x = images(b, net.input_shape(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(b));
}
BENCHMARK(BM_MlpForward)->Arg(64)->Arg(1000);

void BM_MlpLossAndGrads(benchmark::State& state) {
  const Network net = mlp();
  const std::size_t b = static_cast<std::size_t>(state.range(0));
  const Tensor x = images(b, net.input_shape(), 3);
  const auto y = labels(b);
  ParamList grads;
  for (auto _ : state) benchmark::DoNotOptimize(net.loss_and_grads(x, y, grads));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(b));
}
BENCHMARK(BM_MlpLossAndGrads)->Arg(64);

void BM_LenetLossAndGrads(benchmark::State& state) {
  Network net = make_lenet5();
  net.init_he_uniform(4);
  const std::size_t b = static_cast<std::size_t>(state.range(0));
  const Tensor x = images(b, net.input_shape(), 5);
  const auto y = labels(b);
  ParamList grads;
  for (auto _ : state) benchmark::DoNotOptimize(net.loss_and_grads(x, y, grads));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(b));
}
BENCHMARK(BM_LenetLossAndGrads)->Arg(64);

}  // namespace
}  // namespace admmc
