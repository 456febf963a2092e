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


#include "admmc/report.hpp"

#include "admmc/error.hpp"

namespace admmc {

std::size_t estimate_index_bytes(std::size_t numel, std::size_t survivors) {
  if (survivors == 0) return 0;
  const std::size_t zeros = numel - survivors;
  // Gaps differ by at most one: `wide` gaps of base + 1, the rest base.
  const std::size_t base = zeros / survivors;
  const std::size_t wide = zeros % survivors;
  const std::size_t nibbles = (survivors - wide) * (1 + base / 15) +
                              wide * (1 + (base + 1) / 15);
  return (nibbles + 1) / 2;
}

CompressionReport compute_ratios(std::span<const LayerStats> layers,
                                 ReportOptions options) {
  CompressionReport report;
  report.include_codebook = options.include_codebook;
  std::size_t weights = 0, survivors = 0;
  for (const LayerStats& s : layers) {
    if (s.bits < 1 || s.bits > 32) {
      throw ConfigError("layer '" + s.name + "': bits must lie in [1, 32]");
    }
    if (s.survivors > s.numel) {
      throw ConfigError("layer '" + s.name + "': survivors exceed weight count");
    }
    LayerReport r;
    r.stats = s;
    r.data_bytes = (s.survivors * s.bits + 7) / 8;
    r.codebook_bytes = s.codebook_bytes.value_or(s.bits < 32 ? 4 : 0);
    // A tiny layer whose codes plus codebook outgrow plain floats is
    // stored raw instead, so fewer bits never cost more bytes.
    if (options.include_codebook && !s.codebook_bytes && s.bits < 32 &&
        r.data_bytes + r.codebook_bytes > 4 * s.survivors) {
      r.data_bytes = 4 * s.survivors;
      r.codebook_bytes = 0;
    }
    r.index_bytes = s.index_bytes.value_or(
        s.survivors == s.numel ? 0 : estimate_index_bytes(s.numel, s.survivors));
    report.baseline_bytes += 4 * s.numel;
    report.data_bytes += r.data_bytes + (options.include_codebook ? r.codebook_bytes : 0);
    report.model_bytes += r.index_bytes;
    weights += s.numel;
    survivors += s.survivors;
    report.layers.push_back(std::move(r));
  }
  report.model_bytes += report.data_bytes;
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  report.data_ratio = ratio(report.baseline_bytes, report.data_bytes);
  report.model_ratio = ratio(report.baseline_bytes, report.model_bytes);
  report.weight_reduction = ratio(weights, survivors);
  return report;
}

std::vector<LayerStats> model_stats(const Network& net,
                                    const std::vector<Mask>& masks,
                                    const std::vector<Codebook>& codebooks) {
  const SizeBreakdown sizes = measure(net, masks, codebooks);
  std::vector<LayerStats> stats;
  std::size_t slot = 0;
  for (std::size_t k = 0; k < net.layers().size(); ++k) {
    if (!net.layers()[k].trainable()) continue;
    const LayerSizes& s = sizes.layers[slot];
    stats.push_back({to_string(net.layers()[k].kind) + std::to_string(slot + 1),
                     s.numel, s.survivors, s.bits, s.codebook_bytes, s.index_bytes});
    ++slot;
  }
  return stats;
}

}  // namespace admmc
