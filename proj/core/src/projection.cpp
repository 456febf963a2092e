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

#include "admmc/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <set>

#include "admmc/error.hpp"

namespace admmc {
namespace {

bool kept(const Mask& mask, std::size_t i) { return mask.empty() || mask[i]; }

void require_mask(const Tensor& t, const Mask& mask, const char* what) {
  if (!mask.empty() && mask.size() != t.numel()) {
    throw ConfigError(std::string(what) + ": mask length " +
                      std::to_string(mask.size()) + " != tensor size " +
                      std::to_string(t.numel()));
  }
}

std::vector<float> surviving_values(const Tensor& t, const Mask& mask) {
  std::vector<float> values;
  for (std::size_t i = 0; i < t.numel(); ++i) {
    if (kept(mask, i)) values.push_back(t[i]);
  }
  return values;
}

std::size_t nearest_centroid(float v, const std::vector<float>& centroids) {
  std::size_t best = 0;
  float best_distance = std::abs(v - centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const float d = std::abs(v - centroids[c]);
    if (d < best_distance) {
      best_distance = d;
      best = c;
    }
  }
  return best;
}

// Lloyd's algorithm on sorted values with prefix sums. Clusters are the
// contiguous runs between consecutive centroid midpoints.
struct SortedLloyd {
  const std::vector<double>& x;       // ascending
  std::vector<double> prefix, prefix_sq;

  explicit SortedLloyd(const std::vector<double>& sorted) : x(sorted) {
    prefix.assign(x.size() + 1, 0.0);
    prefix_sq.assign(x.size() + 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      prefix[i + 1] = prefix[i] + x[i];
      prefix_sq[i + 1] = prefix_sq[i] + x[i] * x[i];
    }
  }

  double segment_cost(std::size_t lo, std::size_t hi, double c) const {
    const double n = static_cast<double>(hi - lo);
    const double s = prefix[hi] - prefix[lo];
    const double sq = prefix_sq[hi] - prefix_sq[lo];
    return std::max(0.0, sq - 2.0 * c * s + c * c * n);
  }

  // ends[j] = one past the last value of cluster j (centroids ascending).
  std::vector<std::size_t> assign(const std::vector<double>& c) const {
    std::vector<std::size_t> ends(c.size());
    for (std::size_t j = 0; j + 1 < c.size(); ++j) {
      const double boundary = 0.5 * (c[j] + c[j + 1]);
      ends[j] = static_cast<std::size_t>(
          std::upper_bound(x.begin(), x.end(), boundary) - x.begin());
      if (j > 0) ends[j] = std::max(ends[j], ends[j - 1]);
    }
    ends.back() = x.size();
    return ends;
  }

  struct Result {
    std::vector<double> centroids;
    std::vector<double> trace;
    double sse;
  };

  Result run(std::vector<double> c, std::size_t max_iterations) const {
    Result result;
    std::vector<std::size_t> previous;
    for (std::size_t it = 0; it < max_iterations; ++it) {
      std::sort(c.begin(), c.end());
      std::vector<std::size_t> ends = assign(c);
      if (ends == previous) break;
      reseed_empty(c, ends);
      double sse = 0.0;
      std::size_t lo = 0;
      for (std::size_t j = 0; j < c.size(); ++j) {
        const std::size_t hi = ends[j];
        if (hi > lo) {
          c[j] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
          sse += segment_cost(lo, hi, c[j]);
        }
        lo = hi;
      }
      result.trace.push_back(sse);
      previous = std::move(ends);
    }
    std::sort(c.begin(), c.end());
    result.centroids = std::move(c);
    result.sse = result.trace.empty() ? 0.0 : result.trace.back();
    return result;
  }

  // Gives every empty run the single value farthest from its own centroid,
  // taken from a run of at least two values. Keeps runs contiguous by
  // re-sorting the centroid at the stolen value's position.
  void reseed_empty(std::vector<double>& c, std::vector<std::size_t>& ends) const {
    for (;;) {
      std::size_t empty = c.size();
      std::size_t lo = 0;
      for (std::size_t j = 0; j < c.size(); lo = ends[j], ++j) {
        if (ends[j] == lo) {
          empty = j;
          break;
        }
      }
      if (empty == c.size()) return;
      double worst = -1.0;
      std::size_t worst_index = x.size();
      lo = 0;
      for (std::size_t j = 0; j < c.size(); lo = ends[j], ++j) {
        if (ends[j] - lo < 2) continue;
        for (std::size_t i : {lo, ends[j] - 1}) {  // farthest is an endpoint
          const double d = std::abs(x[i] - c[j]);
          if (d > worst) {
            worst = d;
            worst_index = i;
          }
        }
      }
      if (worst_index == x.size() || worst <= 0.0) return;  // nothing to split
      c[empty] = x[worst_index];
      std::sort(c.begin(), c.end());
      ends = assign(c);
      // A duplicate run may still be empty if equal values straddle; stop
      // once no progress is possible.
      bool any_empty = false;
      lo = 0;
      for (std::size_t j = 0; j < c.size(); lo = ends[j], ++j) any_empty |= ends[j] == lo;
      if (!any_empty) return;
    }
  }
};

}  // namespace

SparsityProjection project_sparsity(const Tensor& t, std::size_t alpha) {
  const std::size_t n = t.numel();
  if (alpha > n) {
    throw ConfigError("project_sparsity: alpha " + std::to_string(alpha) +
                      " exceeds tensor size " + std::to_string(n));
  }
  SparsityProjection out{Tensor(t.shape()), Mask(n, 0)};
  if (alpha == 0) return out;
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  const auto data = t.data();
  auto before = [&](std::uint32_t a, std::uint32_t b) {
    const float ma = std::abs(data[a]), mb = std::abs(data[b]);
    return ma > mb || (ma == mb && a < b);
  };
  if (alpha < n) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(alpha - 1),
                     order.end(), before);
  }
  for (std::size_t k = 0; k < alpha; ++k) {
    out.mask[order[k]] = 1;
    out.projected[order[k]] = data[order[k]];
  }
  return out;
}

QuantSpec::QuantSpec(std::size_t level_count, float interval)
    : levels_(level_count), interval_(interval) {
  if (levels_ < 2 || levels_ % 2 != 0 || levels_ > (1u << 16)) {
    throw ConfigError("quantization level count must be even and in [2, 65536], got " +
                      std::to_string(levels_));
  }
  if (!(interval_ > 0.0f) || !std::isfinite(interval_)) {
    throw ConfigError("quantization interval must be positive and finite");
  }
}

float QuantSpec::level(int k) const noexcept {
  const float magnitude = static_cast<float>(std::abs(k)) * interval_;
  return k < 0 ? -magnitude : magnitude;
}

std::vector<float> QuantSpec::levels() const {
  std::vector<float> out;
  const int h = static_cast<int>(half());
  for (int k = -h; k <= h; ++k) {
    if (k != 0) out.push_back(level(k));
  }
  return out;
}

int QuantSpec::nearest_index(float w) const noexcept {
  const double ratio = std::abs(static_cast<double>(w)) / static_cast<double>(interval_);
  const int h = static_cast<int>(half());
  const int guess = static_cast<int>(std::clamp(std::floor(ratio + 0.5), 1.0, static_cast<double>(h)));
  // The float levels k * q carry rounding, so settle near-midpoints by the
  // exact distance to the neighbouring levels; ties go to the larger one.
  const double magnitude = std::abs(static_cast<double>(w));
  int index = guess;
  double best = std::abs(magnitude - static_cast<double>(level(guess)));
  for (int k : {guess - 1, guess + 1}) {
    if (k < 1 || k > h) continue;
    const double d = std::abs(magnitude - static_cast<double>(level(k)));
    if (d < best || (d == best && k > index)) {
      best = d;
      index = k;
    }
  }
  return w < 0.0f ? -index : index;
}

Tensor project_quantize(const Tensor& t, const QuantSpec& spec, const Mask& mask) {
  require_mask(t, mask, "project_quantize");
  Tensor out(t.shape());
  for (std::size_t i = 0; i < t.numel(); ++i) {
    if (kept(mask, i)) out[i] = spec.nearest(t[i]);
  }
  return out;
}

double quantization_sse(const Tensor& t, const Mask& mask,
                        std::size_t level_count, double interval) {
  require_mask(t, mask, "quantization_sse");
  const double half = static_cast<double>(level_count / 2);
  double sse = 0.0;
  for (std::size_t i = 0; i < t.numel(); ++i) {
    if (!kept(mask, i)) continue;
    const double a = std::abs(static_cast<double>(t[i]));
    const double k = std::clamp(std::floor(a / interval + 0.5), 1.0, half);
    const double e = a - k * interval;
    sse += e * e;
  }
  return sse;
}

double fit_interval(const Tensor& t, const Mask& mask, std::size_t level_count) {
  require_mask(t, mask, "fit_interval");
  if (level_count < 2 || level_count % 2 != 0) {
    throw ConfigError("fit_interval: level count must be even and >= 2");
  }
  std::vector<double> a;
  for (std::size_t i = 0; i < t.numel(); ++i) {
    if (kept(mask, i)) a.push_back(std::abs(static_cast<double>(t[i])));
  }
  if (a.empty() || *std::max_element(a.begin(), a.end()) == 0.0) {
    throw DegenerateInputError("fit_interval: no nonzero surviving weights");
  }
  const auto half = static_cast<std::uint32_t>(level_count / 2);

  // Sweep q downwards. Weight j sits on level k_j; crossing q = a_j/(k+1/2)
  // moves it to k+1. With S1 = sum k a and S2 = sum k^2, the piece's SSE is
  // S0 - 2 q S1 + q^2 S2, minimised at S1/S2 clipped to the piece.
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (double v : a) {
    s0 += v * v;
    s1 += v;
    s2 += 1.0;
  }
  struct Event {
    double at;
    std::uint32_t weight;
    std::uint32_t from;  // level index before crossing
    bool operator<(const Event& o) const {
      return at < o.at || (at == o.at && weight > o.weight);
    }
  };
  std::priority_queue<Event> events;
  if (half > 1) {
    for (std::uint32_t j = 0; j < a.size(); ++j) {
      if (a[j] > 0.0) events.push({a[j] / 1.5, j, 1});
    }
  }

  struct Candidate {
    double q, sse;
  };
  std::vector<Candidate> candidates;
  auto consider = [&](double lo, double hi) {
    const double q = std::clamp(s1 / s2, lo, hi);
    if (q > 0.0) candidates.push_back({q, s0 - 2.0 * q * s1 + q * q * s2});
  };

  double hi = std::numeric_limits<double>::infinity();
  while (!events.empty()) {
    const Event e = events.top();
    events.pop();
    if (e.at < hi) consider(e.at, hi);
    hi = std::min(hi, e.at);
    s1 += a[e.weight];
    s2 += 2.0 * e.from + 1.0;
    const std::uint32_t next = e.from + 1;
    if (next < half) events.push({a[e.weight] / (next + 0.5), e.weight, next});
  }
  consider(std::numeric_limits<double>::min(), hi);

  double best_estimate = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best_estimate = std::min(best_estimate, c.sse);
  // Re-evaluate the near-ties directly to shed cancellation error.
  const double slack = 1e-9 * s0 + 1e-300;
  double best_q = 0.0, best_sse = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    if (c.sse > best_estimate + slack) continue;
    const double exact = quantization_sse(t, mask, level_count, c.q);
    if (exact < best_sse) {
      best_sse = exact;
      best_q = c.q;
    }
  }
  return best_q;
}

ClusterProjection project_cluster(const Tensor& t, const ClusterSpec& spec,
                                  const Mask& mask) {
  require_mask(t, mask, "project_cluster");
  if (spec.centroids.empty()) throw ConfigError("project_cluster: no centroids");
  const std::size_t m = spec.centroids.size();
  ClusterProjection out{Tensor(t.shape()), {spec.centroids, {}}, 0};
  std::vector<std::uint32_t>& assignment = out.spec.assignment;
  assignment.assign(t.numel(), kUnassigned);
  std::vector<std::size_t> members(m, 0);
  for (std::size_t i = 0; i < t.numel(); ++i) {
    if (!kept(mask, i)) continue;
    const auto c = static_cast<std::uint32_t>(nearest_centroid(t[i], spec.centroids));
    assignment[i] = c;
    ++members[c];
  }
  for (std::size_t c = 0; c < m; ++c) {
    if (members[c] != 0) continue;
    float worst = -1.0f;
    std::size_t worst_index = t.numel();
    for (std::size_t i = 0; i < t.numel(); ++i) {
      const std::uint32_t owner = assignment[i];
      if (owner == kUnassigned || members[owner] < 2) continue;
      const float d = std::abs(t[i] - spec.centroids[owner]);
      if (d > worst) {
        worst = d;
        worst_index = i;
      }
    }
    if (worst_index == t.numel() || worst <= 0.0f) continue;
    --members[assignment[worst_index]];
    assignment[worst_index] = static_cast<std::uint32_t>(c);
    members[c] = 1;
    ++out.reseeded;
  }
  std::vector<double> sums(m, 0.0);
  for (std::size_t i = 0; i < t.numel(); ++i) {
    if (assignment[i] != kUnassigned) sums[assignment[i]] += t[i];
  }
  for (std::size_t c = 0; c < m; ++c) {
    if (members[c] > 0) {
      out.spec.centroids[c] =
          static_cast<float>(sums[c] / static_cast<double>(members[c]));
    }
  }
  for (std::size_t i = 0; i < t.numel(); ++i) {
    if (assignment[i] != kUnassigned) out.projected[i] = out.spec.centroids[assignment[i]];
  }
  return out;
}

CentroidInit init_centroids(const Tensor& t, const Mask& mask, std::size_t m,
                            std::uint64_t seed, KMeansOptions options) {
  require_mask(t, mask, "init_centroids");
  if (m == 0) throw ConfigError("init_centroids: cluster count must be >= 1");
  const std::vector<float> values = surviving_values(t, mask);
  if (values.empty()) {
    throw DegenerateInputError("init_centroids: no surviving weights");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  CentroidInit result;
  if (distinct.size() <= m) {
    result.padded = distinct.size() < m;
    for (double v : distinct) result.centroids.push_back(static_cast<float>(v));
    result.centroids.resize(m, result.centroids.back());
    result.sse = 0.0;
    result.sse_trace = {0.0};
    return result;
  }

  const SortedLloyd lloyd(sorted);
  std::mt19937_64 rng(seed);
  SortedLloyd::Result best;
  best.sse = std::numeric_limits<double>::infinity();
  const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
  for (std::size_t r = 0; r < restarts; ++r) {
    // k-means++ seeding: D^2-weighted draws.
    std::vector<double> c;
    std::uniform_int_distribution<std::size_t> pick(0, sorted.size() - 1);
    c.push_back(sorted[pick(rng)]);
    std::vector<double> d2(sorted.size());
    while (c.size() < m) {
      double total = 0.0;
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        double best_d = std::numeric_limits<double>::infinity();
        for (double centre : c) best_d = std::min(best_d, (sorted[i] - centre) * (sorted[i] - centre));
        d2[i] = best_d;
        total += best_d;
      }
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      std::size_t chosen = sorted.size() - 1;
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (d2[i] <= 0.0) continue;
        target -= d2[i];
        if (target <= 0.0) {
          chosen = i;
          break;
        }
      }
      if (d2[chosen] <= 0.0) {  // numerical tail; take the farthest value
        chosen = static_cast<std::size_t>(std::max_element(d2.begin(), d2.end()) - d2.begin());
      }
      c.push_back(sorted[chosen]);
    }
    SortedLloyd::Result run = lloyd.run(std::move(c), options.max_iterations);
    if (run.sse < best.sse) best = std::move(run);
  }
  result.sse = best.sse;
  result.sse_trace = std::move(best.trace);
  for (double v : best.centroids) result.centroids.push_back(static_cast<float>(v));
  return result;
}

double cluster_sse(const Tensor& t, const Mask& mask,
                   const std::vector<float>& centroids) {
  require_mask(t, mask, "cluster_sse");
  if (centroids.empty()) throw ConfigError("cluster_sse: no centroids");
  double sse = 0.0;
  for (std::size_t i = 0; i < t.numel(); ++i) {
    if (!kept(mask, i)) continue;
    const double d = static_cast<double>(t[i]) - centroids[nearest_centroid(t[i], centroids)];
    sse += d * d;
  }
  return sse;
}

std::size_t distinct_nonzero_count(const Tensor& t) {
  std::set<float> seen;
  for (float v : t.data()) {
    if (v != 0.0f) seen.insert(v);
  }
  return seen.size();
}

}  // namespace admmc
