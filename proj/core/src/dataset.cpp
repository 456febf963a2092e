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

#include "admmc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "admmc/error.hpp"
#include "wire.hpp"

namespace admmc {
namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t at) {
  return (static_cast<std::uint32_t>(bytes[at]) << 24) |
         (static_cast<std::uint32_t>(bytes[at + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[at + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[at + 3]);
}

void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void require_bytes(const std::vector<std::uint8_t>& bytes, std::size_t n,
                   const std::string& path) {
  if (bytes.size() < n) {
    throw IoError(path + ": truncated IDX file (" + std::to_string(bytes.size()) +
                  " bytes, need " + std::to_string(n) + ")");
  }
}

}  // namespace

Tensor Dataset::gather(std::span<const std::size_t> rows) const {
  const std::size_t dim = feature_dim();
  Shape shape{rows.size()};
  shape.insert(shape.end(), sample_shape.begin(), sample_shape.end());
  Tensor batch(std::move(shape));
  float* dst = batch.data().data();
  for (std::size_t r : rows) {
    std::copy_n(images.begin() + static_cast<std::ptrdiff_t>(r * dim), dim, dst);
    dst += dim;
  }
  return batch;
}

std::vector<std::int32_t> Dataset::gather_labels(std::span<const std::size_t> rows) const {
  std::vector<std::int32_t> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(labels[r]);
  return out;
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  end = std::min(end, size());
  begin = std::min(begin, end);
  Dataset out{sample_shape, class_count, {}, {}, split};
  const std::size_t dim = feature_dim();
  out.images.assign(images.begin() + static_cast<std::ptrdiff_t>(begin * dim),
                    images.begin() + static_cast<std::ptrdiff_t>(end * dim));
  out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(begin),
                    labels.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

void Dataset::validate() const {
  if (images.size() != labels.size() * feature_dim()) {
    throw ConsistencyError("dataset holds " + std::to_string(images.size()) +
                           " pixels for " + std::to_string(labels.size()) +
                           " labels of dim " + std::to_string(feature_dim()));
  }
  for (std::int32_t label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= class_count) {
      throw ConsistencyError("label " + std::to_string(label) +
                             " outside [0, " + std::to_string(class_count) + ")");
    }
  }
  for (float v : images) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw ConsistencyError("pixel value outside [0, 1]");
    }
  }
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 Split split) {
  const auto image_bytes = wire::read_file(images_path);
  const auto label_bytes = wire::read_file(labels_path);
  require_bytes(image_bytes, 16, images_path);
  require_bytes(label_bytes, 8, labels_path);
  if (read_be32(image_bytes, 0) != kIdxImagesMagic) {
    throw FormatError(images_path + ": not an IDX image file (magic " +
                      std::to_string(read_be32(image_bytes, 0)) + ")");
  }
  if (read_be32(label_bytes, 0) != kIdxLabelsMagic) {
    throw FormatError(labels_path + ": not an IDX label file (magic " +
                      std::to_string(read_be32(label_bytes, 0)) + ")");
  }
  const std::size_t n = read_be32(image_bytes, 4);
  const std::size_t rows = read_be32(image_bytes, 8);
  const std::size_t cols = read_be32(image_bytes, 12);
  const std::size_t n_labels = read_be32(label_bytes, 4);
  if (n != n_labels) {
    throw ConsistencyError("IDX count mismatch: " + std::to_string(n) +
                           " images vs " + std::to_string(n_labels) + " labels");
  }
  const std::size_t dim = rows * cols;
  require_bytes(image_bytes, 16 + n * dim, images_path);
  require_bytes(label_bytes, 8 + n, labels_path);

  Dataset data;
  data.sample_shape = {1, rows, cols};
  data.split = split;
  data.images.resize(n * dim);
  for (std::size_t i = 0; i < n * dim; ++i) {
    data.images[i] = static_cast<float>(image_bytes[16 + i]) / 255.0f;
  }
  data.labels.resize(n);
  std::int32_t max_label = -1;
  for (std::size_t i = 0; i < n; ++i) {
    data.labels[i] = label_bytes[8 + i];
    max_label = std::max(max_label, data.labels[i]);
  }
  data.class_count = static_cast<std::size_t>(max_label + 1);
  return data;
}

void write_idx(const Dataset& data, const std::string& images_path,
               const std::string& labels_path) {
  data.validate();
  if (data.sample_shape.size() != 3 || data.sample_shape[0] != 1) {
    throw ConfigError("write_idx: expected (1, rows, cols) samples");
  }
  std::vector<std::uint8_t> images;
  append_be32(images, kIdxImagesMagic);
  append_be32(images, static_cast<std::uint32_t>(data.size()));
  append_be32(images, static_cast<std::uint32_t>(data.sample_shape[1]));
  append_be32(images, static_cast<std::uint32_t>(data.sample_shape[2]));
  for (float v : data.images) {
    images.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0f)));
  }
  std::vector<std::uint8_t> labels;
  append_be32(labels, kIdxLabelsMagic);
  append_be32(labels, static_cast<std::uint32_t>(data.size()));
  for (std::int32_t l : data.labels) {
    if (l > 255) throw ConfigError("write_idx: label does not fit a byte");
    labels.push_back(static_cast<std::uint8_t>(l));
  }
  wire::write_file(images_path, images);
  wire::write_file(labels_path, labels);
}

MnistData load_mnist(const std::string& dir) {
  const std::filesystem::path root(dir);
  auto path = [&](const char* name) { return (root / name).string(); };
  MnistData data{
      load_idx(path("train-images-idx3-ubyte"), path("train-labels-idx1-ubyte"),
               Split::kTrain),
      load_idx(path("t10k-images-idx3-ubyte"), path("t10k-labels-idx1-ubyte"),
               Split::kTest)};
  data.train.class_count = data.test.class_count =
      std::max(data.train.class_count, data.test.class_count);
  return data;
}

Dataset synthetic_blobs(std::size_t n, std::size_t classes, std::size_t dim,
                        std::uint64_t seed, float spread) {
  if (classes == 0 || dim == 0) {
    throw ConfigError("synthetic_blobs: classes and dim must be >= 1");
  }
  if (!(spread >= 0.0f)) throw ConfigError("synthetic_blobs: spread must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> centre(0.2f, 0.8f);
  std::normal_distribution<float> noise(0.0f, spread);
  std::vector<float> centres(classes * dim);
  for (float& c : centres) c = centre(rng);

  Dataset data;
  data.sample_shape = {dim};
  data.class_count = classes;
  data.images.resize(n * dim);
  data.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = i % classes;
    data.labels[i] = static_cast<std::int32_t>(label);
    for (std::size_t j = 0; j < dim; ++j) {
      const float v = centres[label * dim + j] + (spread > 0.0f ? noise(rng) : 0.0f);
      data.images[i * dim + j] = std::clamp(v, 0.0f, 1.0f);
    }
  }
  return permuted(data, seeded_permutation(n, seed ^ 0x9e3779b97f4a7c15ULL));
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

Dataset permuted(const Dataset& data, std::span<const std::size_t> order) {
  if (order.size() != data.size()) {
    throw ConfigError("permutation length does not match dataset size");
  }
  Dataset out{data.sample_shape, data.class_count, {}, {}, data.split};
  out.images.resize(data.images.size());
  out.labels.resize(data.size());
  const std::size_t dim = data.feature_dim();
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::copy_n(data.images.begin() + static_cast<std::ptrdiff_t>(order[i] * dim),
                dim, out.images.begin() + static_cast<std::ptrdiff_t>(i * dim));
    out.labels[i] = data.labels[order[i]];
  }
  return out;
}

}  // namespace admmc
