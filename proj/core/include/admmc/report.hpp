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


#ifndef ADMMC_REPORT_HPP_
#define ADMMC_REPORT_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "admmc/codec.hpp"

namespace admmc {

struct LayerStats {
  std::string name;
  std::size_t numel = 0;
  std::size_t survivors = 0;
  std::size_t bits = 32;
  // Measured sizes when known; otherwise estimated (see compute_ratios).
  std::optional<std::size_t> codebook_bytes;
  std::optional<std::size_t> index_bytes;
};

struct ReportOptions {
  bool include_codebook = true;
};

struct LayerReport {
  LayerStats stats;
  std::size_t data_bytes = 0;      // packed codes
  std::size_t codebook_bytes = 0;
  std::size_t index_bytes = 0;
};

struct CompressionReport {
  std::vector<LayerReport> layers;
  std::size_t baseline_bytes = 0;  // every weight as a 32-bit float
  std::size_t data_bytes = 0;      // codes (+ codebooks unless excluded)
  std::size_t model_bytes = 0;     // data + index stream
  double data_ratio = 0.0;
  double model_ratio = 0.0;
  double weight_reduction = 0.0;  // total weights / survivors
  bool include_codebook = true;
};

// Per layer: codes take ceil(survivors * bits / 8) bytes; the codebook takes
// 4 bytes for a quantization interval (bits < 32) or nothing for raw 32-bit
// weights unless given; the index stream is estimated by assuming the
// zeros are spread evenly between survivors unless given. A layer whose
// estimated codes plus codebook exceed 4 bytes per survivor is counted as
// raw floats instead.
// Throws ConfigError on bits outside [1, 32] or survivors > numel.
CompressionReport compute_ratios(std::span<const LayerStats> layers,
                                 ReportOptions options = {});

// Relative-index nibble bytes for survivors spread evenly over numel.
std::size_t estimate_index_bytes(std::size_t numel, std::size_t survivors);

// Statistics of an encodable model with measured codebook and index sizes.
std::vector<LayerStats> model_stats(const Network& net,
                                    const std::vector<Mask>& masks,
                                    const std::vector<Codebook>& codebooks);

}  // namespace admmc

#endif  // ADMMC_REPORT_HPP_
