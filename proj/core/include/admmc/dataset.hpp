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

#ifndef ADMMC_DATASET_HPP_
#define ADMMC_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "admmc/tensor.hpp"

namespace admmc {

enum class Split : std::uint8_t { kTrain, kTest };

// Images are stored row-major, one sample of shape sample_shape per row,
// with values in [0, 1].
struct Dataset {
  Shape sample_shape;
  std::size_t class_count = 0;
  std::vector<float> images;
  std::vector<std::int32_t> labels;
  Split split = Split::kTrain;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t feature_dim() const noexcept { return shape_numel(sample_shape); }

  // Gathers the given rows into a (B, sample_shape...) tensor.
  Tensor gather(std::span<const std::size_t> rows) const;
  std::vector<std::int32_t> gather_labels(std::span<const std::size_t> rows) const;
  // Contiguous rows [begin, end) as a new dataset with the same metadata.
  Dataset slice(std::size_t begin, std::size_t end) const;

  // Throws ConsistencyError if sizes, labels or pixel ranges are off.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

// Parses an IDX image/label file pair. Pixels are scaled by 1/255.
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 Split split = Split::kTrain);
// Inverse of load_idx for datasets whose pixels are multiples of 1/255.
void write_idx(const Dataset& data, const std::string& images_path,
               const std::string& labels_path);

struct MnistData {
  Dataset train;
  Dataset test;
};
// Loads train-images-idx3-ubyte & co. from a directory.
MnistData load_mnist(const std::string& dir);

// One Gaussian cluster per class with centres drawn uniformly from
// [0.2, 0.8]^dim; samples are clipped to [0, 1].
Dataset synthetic_blobs(std::size_t n, std::size_t classes, std::size_t dim,
                        std::uint64_t seed, float spread = 0.05f);

// Seeded Fisher-Yates permutation of [0, n).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

// Reorders rows of the dataset by the permutation, keeping pairs intact.
Dataset permuted(const Dataset& data, std::span<const std::size_t> order);

}  // namespace admmc

#endif  // ADMMC_DATASET_HPP_
