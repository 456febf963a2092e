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


#include "admmc/least_squares.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "admmc/dataset.hpp"
#include "admmc/error.hpp"

namespace admmc {
namespace {

// Calls fn(combination) for every k-subset of [0, n) in lexicographic order.
template <typename Fn>
void for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  for (;;) {
    fn(std::as_const(pick));
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace

LeastSquaresProblem::LeastSquaresProblem(Tensor design, std::vector<float> targets)
    : design_(std::move(design)), targets_(std::move(targets)) {
  if (design_.rank() != 2 || design_.dim(0) != targets_.size() || targets_.empty()) {
    throw ConfigError("least squares: design " + shape_to_string(design_.shape()) +
                      " does not match " + std::to_string(targets_.size()) +
                      " targets");
  }
  params_.push_back({Tensor({1, design_.dim(1)}), Tensor({0})});
}

double LeastSquaresProblem::objective(std::span<const float> w) const {
  const std::size_t n = samples(), d = dim();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = -static_cast<double>(targets_[i]);
    for (std::size_t j = 0; j < d; ++j) r += static_cast<double>(design_[i * d + j]) * w[j];
    total += r * r;
  }
  return total / (2.0 * static_cast<double>(n));
}

double LeastSquaresProblem::next_batch(ParamList& grads) {
  const std::size_t n = samples(), d = dim();
  grads = zeros_like(params_);
  const auto w = params_[0].weight.data();
  auto g = grads[0].weight.data();
  std::vector<double> acc(d, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = -static_cast<double>(targets_[i]);
    for (std::size_t j = 0; j < d; ++j) r += static_cast<double>(design_[i * d + j]) * w[j];
    total += r * r;
    for (std::size_t j = 0; j < d; ++j) acc[j] += r * design_[i * d + j];
  }
  for (std::size_t j = 0; j < d; ++j) g[j] = static_cast<float>(acc[j] / static_cast<double>(n));
  return total / (2.0 * static_cast<double>(n));
}

std::vector<double> LeastSquaresProblem::solve_on_support(
    std::span<const std::size_t> support) const {
  const std::size_t n = samples(), d = dim(), k = support.size();
  std::vector<double> w(d, 0.0);
  if (k == 0) return w;
  Eigen::MatrixXd a(n, k);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y(static_cast<Eigen::Index>(i)) = targets_[i];
    for (std::size_t j = 0; j < k; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          design_[i * d + support[j]];
    }
  }
  const Eigen::VectorXd x = (a.transpose() * a).ldlt().solve(a.transpose() * y);
  for (std::size_t j = 0; j < k; ++j) w[support[j]] = x(static_cast<Eigen::Index>(j));
  return w;
}

SparseRegression make_sparse_regression(std::size_t samples, std::size_t dim,
                                        std::size_t support, float noise,
                                        std::uint64_t seed, float fixed_magnitude) {
  if (support > dim) throw ConfigError("support larger than dimension");
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  std::uniform_real_distribution<float> magnitude(1.0f, 2.0f);
  SparseRegression out{Tensor({samples, dim}), std::vector<float>(samples),
                       std::vector<float>(dim, 0.0f)};
  for (float& v : out.design.data()) v = gauss(rng);
  const std::vector<std::size_t> order = seeded_permutation(dim, rng());
  for (std::size_t j = 0; j < support; ++j) {
    const float m = fixed_magnitude > 0.0f ? fixed_magnitude : magnitude(rng);
    out.truth[order[j]] = (rng() & 1u) ? m : -m;
  }
  for (std::size_t i = 0; i < samples; ++i) {
    double y = 0.0;
    for (std::size_t j = 0; j < dim; ++j) y += out.design[i * dim + j] * out.truth[j];
    out.targets[i] = static_cast<float>(y) + noise * gauss(rng);
  }
  return out;
}

SubsetOptimum best_subset(const LeastSquaresProblem& problem, std::size_t k) {
  SubsetOptimum best;
  best.objective = std::numeric_limits<double>::infinity();
  for_each_combination(problem.dim(), k, [&](const std::vector<std::size_t>& s) {
    std::vector<double> w = problem.solve_on_support(s);
    std::vector<float> wf(w.begin(), w.end());
    const double f = problem.objective(wf);
    if (f < best.objective) best = {s, std::move(w), f};
  });
  return best;
}

SubsetOptimum best_signed_subset(const LeastSquaresProblem& problem, std::size_t k) {
  const std::size_t n = problem.samples(), d = problem.dim();
  const Tensor& a = problem.design();
  const auto& y = problem.targets();
  SubsetOptimum best;
  best.objective = std::numeric_limits<double>::infinity();
  for_each_combination(d, k, [&](const std::vector<std::size_t>& s) {
    for (std::uint64_t signs = 0; signs < (1ull << k); ++signs) {
      // With w = q * sign pattern, A w = q * x where x = sum_j sign_j A_j.
      double xx = 0.0, xy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double x = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          const double col = a[i * d + s[j]];
          x += ((signs >> j) & 1u) ? -col : col;
        }
        xx += x * x;
        xy += x * y[i];
      }
      if (xx <= 0.0 || xy <= 0.0) continue;
      const double q = xy / xx;
      std::vector<double> w(d, 0.0);
      for (std::size_t j = 0; j < k; ++j) w[s[j]] = ((signs >> j) & 1u) ? -q : q;
      std::vector<float> wf(w.begin(), w.end());
      const double f = problem.objective(wf);
      if (f < best.objective) best = {s, std::move(w), f};
    }
  });
  return best;
}

}  // namespace admmc
