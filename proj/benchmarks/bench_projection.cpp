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

#include "admmc/codec.hpp"
#include "admmc/network.hpp"
#include "admmc/projection.hpp"
#include "admmc/tensor.hpp"

namespace admmc {
namespace {

Tensor gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> dist(0.0f, 0.05f);
  Tensor t({n});
  for (float& x : t.data()) x = dist(rng);
  return t;
}

// Top-alpha pruning projection of an MLP-sized layer, keeping 8%.
void BM_ProjectSparsity(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Tensor t = gaussian(n, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_sparsity(t, n / 12));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ProjectSparsity)->Arg(30000)->Arg(235200);

void BM_FitInterval(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Tensor t = gaussian(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_interval(t, {}, 16));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FitInterval)->Arg(18816)->Arg(235200);

void BM_ProjectQuantize(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Tensor t = gaussian(n, 3);
  const QuantSpec spec(16, static_cast<float>(fit_interval(t, {}, 16)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_quantize(t, spec, {}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ProjectQuantize)->Arg(235200);

void BM_InitCentroids(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Tensor t = gaussian(n, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(init_centroids(t, {}, 16, 7));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_InitCentroids)->Arg(18816);

void BM_ProjectCluster(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Tensor t = gaussian(n, 5);
  const ClusterSpec spec{init_centroids(t, {}, 16, 7).centroids, {}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_cluster(t, spec, {}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ProjectCluster)->Arg(18816);

void BM_EncodeModel(benchmark::State& state) {
  std::vector<std::size_t> hidden{300, 100};
  Network net = make_mlp(784, hidden, 10);
  net.init_he_uniform(1);
  std::vector<Mask> masks;
  std::vector<Codebook> books;
  for (auto& p : net.params()) {
    const SparsityProjection s = project_sparsity(p.weight, p.weight.numel() / 10);
    const QuantSpec spec(16, static_cast<float>(fit_interval(s.projected, s.mask, 16)));
    p.weight = project_quantize(s.projected, spec, s.mask);
    masks.push_back(s.mask);
    books.push_back(Codebook::quantization(spec));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode_model(net, masks, books));
  }
}
BENCHMARK(BM_EncodeModel);

}  // namespace
}  // namespace admmc
