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


#ifndef ADMMC_LEAST_SQUARES_HPP_
#define ADMMC_LEAST_SQUARES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "admmc/problem.hpp"

namespace admmc {

// Convex test objective f(w) = 1/(2n) ||A w - y||^2 over a single (1, d)
// weight layer without bias. Every step sees the full data set.
class LeastSquaresProblem final : public TrainingProblem {
 public:
  // design: (n, d) row-major; targets: n values.
  LeastSquaresProblem(Tensor design, std::vector<float> targets);

  ParamList& params() override { return params_; }
  std::size_t steps_per_epoch() const override { return 1; }
  double next_batch(ParamList& grads) override;
  double validation_score() override { return -objective(params_[0].weight.data()); }

  double objective(std::span<const float> w) const;
  std::size_t dim() const noexcept { return design_.dim(1); }
  std::size_t samples() const noexcept { return design_.dim(0); }
  const Tensor& design() const noexcept { return design_; }
  const std::vector<float>& targets() const noexcept { return targets_; }

  // Dense least-squares solution restricted to the given support (normal
  // equations, double precision). Entries outside the support are 0.
  std::vector<double> solve_on_support(std::span<const std::size_t> support) const;

 private:
  Tensor design_;
  std::vector<float> targets_;
  ParamList params_;
};

struct SparseRegression {
  Tensor design;
  std::vector<float> targets;
  std::vector<float> truth;
};

// Gaussian design, `support` nonzero true coefficients of magnitude in
// [1, 2] (or exactly +-magnitude when fixed_magnitude > 0), Gaussian noise.
SparseRegression make_sparse_regression(std::size_t samples, std::size_t dim,
                                        std::size_t support, float noise,
                                        std::uint64_t seed,
                                        float fixed_magnitude = 0.0f);

struct SubsetOptimum {
  std::vector<std::size_t> support;
  std::vector<double> weights;
  double objective = 0.0;
};

// Exhaustive best-subset search over all supports of size k.
SubsetOptimum best_subset(const LeastSquaresProblem& problem, std::size_t k);

// Exhaustive search over supports of size k and sign patterns with all
// nonzeros of equal magnitude q (two-level quantization); q is optimal in
// closed form for each pattern.
SubsetOptimum best_signed_subset(const LeastSquaresProblem& problem, std::size_t k);

}  // namespace admmc

#endif  // ADMMC_LEAST_SQUARES_HPP_
