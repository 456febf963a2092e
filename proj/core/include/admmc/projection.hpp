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

#ifndef ADMMC_PROJECTION_HPP_
#define ADMMC_PROJECTION_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "admmc/tensor.hpp"

// Euclidean projections onto the pruning set (at most alpha nonzeros), the
// equal-distance quantization set and the M-value clustering set.
//
// Masks select the surviving weights; an empty mask selects every entry.
// Masked-out entries are exactly 0 in every projected output.
namespace admmc {

struct SparsityProjection {
  Tensor projected;
  Mask mask;
};

// Keeps the alpha entries of largest magnitude; ties at the cut keep the
// lower flat index. Throws ConfigError if alpha > numel.
SparsityProjection project_sparsity(const Tensor& t, std::size_t alpha);

// Symmetric level set {+-q, +-2q, ..., +-(M/2)q}. Zero is not a level; it is
// represented by the prune mask.
class QuantSpec {
 public:
  QuantSpec(std::size_t level_count, float interval);

  std::size_t level_count() const noexcept { return levels_; }
  std::size_t half() const noexcept { return levels_ / 2; }
  float interval() const noexcept { return interval_; }

  // Level with signed index k in [-M/2, -1] U [1, M/2].
  float level(int k) const noexcept;
  // All levels in ascending order.
  std::vector<float> levels() const;
  // Signed index of the nearest level; exact midpoints round away from zero
  // and magnitudes beyond (M/2)q clamp to the extreme level.
  int nearest_index(float w) const noexcept;
  float nearest(float w) const noexcept { return level(nearest_index(w)); }

 private:
  std::size_t levels_;
  float interval_;
};

Tensor project_quantize(const Tensor& t, const QuantSpec& spec, const Mask& mask);

// Sum over surviving weights of (w - nearest level under interval q)^2,
// evaluated in double precision.
double quantization_sse(const Tensor& t, const Mask& mask,
                        std::size_t level_count, double interval);

// Interval q minimising quantization_sse. The objective is piecewise
// quadratic in q with breakpoints at |w| / (k + 1/2); every piece is
// minimised in closed form, so the result is the global optimum.
// Throws DegenerateInputError when no surviving weight is nonzero.
double fit_interval(const Tensor& t, const Mask& mask, std::size_t level_count);

inline constexpr std::uint32_t kUnassigned =
    std::numeric_limits<std::uint32_t>::max();

struct ClusterSpec {
  std::vector<float> centroids;
  // Per-entry cluster id (flat order); kUnassigned for masked-out entries.
  std::vector<std::uint32_t> assignment;
};

struct ClusterProjection {
  Tensor projected;
  ClusterSpec spec;
  std::size_t reseeded = 0;  // empty clusters revived this round
};

// One Lloyd round: assign every surviving entry to its nearest centroid
// (ties to the lower index), then replace it with its cluster mean. A cluster
// left empty is re-seeded with the entry farthest from its own centroid.
ClusterProjection project_cluster(const Tensor& t, const ClusterSpec& spec,
                                  const Mask& mask);

struct CentroidInit {
  std::vector<float> centroids;  // ascending
  // Fewer distinct surviving values than clusters: centroids are the distinct
  // values padded by repeating the largest one.
  bool padded = false;
  // Within-cluster SSE after every Lloyd update of the winning restart.
  std::vector<double> sse_trace;
  double sse = 0.0;
};

struct KMeansOptions {
  std::size_t restarts = 32;
  std::size_t max_iterations = 300;
};

// 1-D k-means over the surviving values: k-means++ seeding, Lloyd iterations
// to an assignment fixed point, best of several seeded restarts.
CentroidInit init_centroids(const Tensor& t, const Mask& mask, std::size_t m,
                            std::uint64_t seed, KMeansOptions options = {});

// Within-cluster SSE of the surviving values for given centroids (nearest
// assignment).
double cluster_sse(const Tensor& t, const Mask& mask,
                   const std::vector<float>& centroids);

std::size_t distinct_nonzero_count(const Tensor& t);

}  // namespace admmc

#endif  // ADMMC_PROJECTION_HPP_
