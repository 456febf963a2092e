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


#ifndef ADMMC_ADMM_HPP_
#define ADMMC_ADMM_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "admmc/finalize.hpp"
#include "admmc/optimizer.hpp"
#include "admmc/problem.hpp"
#include "admmc/projection.hpp"
#include "admmc/tensor.hpp"

// ADMM driver for
//
//   minimize f(W, b)  subject to  W_i in S_i (at most alpha_i nonzeros)
//                                 W_i in S'_i (2^bits levels or centroids)
//
// Each iteration trains W on f plus the quadratic penalties
// rho_i/2 ||W_i - Z_i + U_i||^2 and rho_i/2 ||W_i - Y_i + V_i||^2, projects
// W + U onto S_i (giving Z) and W + V onto S'_i (giving Y), and accumulates
// the scaled duals U += W - Z, V += W - Y.
namespace admmc {

enum class AdmmMode : std::uint8_t { kSequential, kJoint };
enum class DiscreteKind : std::uint8_t { kNone, kQuantize, kCluster };

std::string to_string(AdmmMode mode);
std::string to_string(DiscreteKind kind);
AdmmMode admm_mode_from_string(const std::string& name);
DiscreteKind discrete_kind_from_string(const std::string& name);

inline constexpr double kInfiniteEps = std::numeric_limits<double>::infinity();

struct LayerTarget {
  std::size_t alpha = 0;  // retained weight count
  std::size_t bits = 0;   // 0: no discreteness constraint on this layer
  double rho = 1e-3;
  double eps = 0.0;  // <= 0: 1e-3 * ||W||^2 at initialization
  std::size_t level_count() const noexcept {
    return bits == 0 ? 0 : std::size_t{1} << bits;
  }
};

struct AdmmSchedule {
  std::size_t max_iterations = 30;
  double epochs_per_iteration = 1.0;
  OptimizerConfig optimizer = fine_tune_optimizer();
};

struct CompressionConfig {
  AdmmMode mode = AdmmMode::kSequential;
  DiscreteKind discrete = DiscreteKind::kQuantize;
  std::vector<LayerTarget> layers;
  AdmmSchedule admm;
  RetrainSchedule retrain;
  QuantizeSchedule quantize;
  ClusterSchedule cluster;
  std::uint64_t seed = 0;

  // Throws ConfigError unless every target fits the given parameters.
  void validate(const ParamList& params) const;
};

// Per-layer ADMM variables. Tensors of an inactive constraint are empty.
struct LayerState {
  Tensor z, u;  // pruning auxiliary and its scaled dual
  Tensor y, v;  // discreteness auxiliary and its scaled dual
  Mask support;  // entries the discreteness constraint may keep nonzero
  std::optional<QuantSpec> quant;
  std::optional<ClusterSpec> cluster;
  double eps = 0.0;
};

struct AdmmTerms {
  bool sparsity = false;
  bool discrete = false;
};

// Squared residuals of one layer after one iteration; unset when the
// constraint is inactive.
struct ResidualRow {
  std::size_t iteration = 0;
  std::size_t layer = 0;
  std::optional<double> w_minus_z;
  std::optional<double> z_drift;
  std::optional<double> w_minus_y;
  std::optional<double> y_drift;
};

struct ResidualTrace {
  std::vector<ResidualRow> rows;
  std::size_t iterations = 0;
  bool converged = false;

  std::span<const ResidualRow> iteration(std::size_t k) const;  // 1-based
};

void write_residual_csv(const ResidualTrace& trace, std::ostream& out);

// True iff every active residual of every row is <= its layer's eps.
bool check_convergence(std::span<const ResidualRow> rows,
                       std::span<const double> eps);

// Adds the active penalty gradients rho (W - Z + U) and rho (W - Y + V) to
// grads and returns the penalty value. Layers with rho == 0 are skipped.
double add_penalty_terms(const ParamList& params,
                         const std::vector<LayerState>& states,
                         const std::vector<LayerTarget>& targets,
                         AdmmTerms terms, ParamList& grads);

// Loss and gradients of the augmented objective on the problem's next batch.
double augmented_grads(TrainingProblem& problem,
                       const std::vector<LayerState>& states,
                       const std::vector<LayerTarget>& targets, AdmmTerms terms,
                       ParamList& grads);

struct AdmmStep {
  std::size_t iteration = 0;
  const std::vector<LayerState>& before;
  const std::vector<LayerState>& after;
  const ParamList& params;
};
using AdmmObserver = std::function<void(const AdmmStep&)>;

struct PruneResult {
  std::vector<Mask> masks;
  ResidualTrace trace;
  std::vector<LayerState> states;
  double score_admm = 0.0;       // before hard projection
  double score_projected = 0.0;  // right after hard projection
  RetrainReport retrain;
};

// Sequential pruning: ADMM on the sparsity constraint, hard projection of W
// onto its alpha largest magnitudes, then masked retraining.
PruneResult admm_prune(TrainingProblem& problem, const CompressionConfig& config,
                       const AdmmObserver& observer = {});

struct DiscretizeResult {
  ResidualTrace trace;
  std::vector<LayerState> states;  // carry the fitted specs
  double score_admm = 0.0;
};

// Sequential discreteness phase on already pruned weights: pruned entries
// stay frozen at 0 and only the survivors are constrained.
DiscretizeResult admm_discretize(TrainingProblem& problem,
                                 const std::vector<Mask>& masks,
                                 const CompressionConfig& config,
                                 const AdmmObserver& observer = {});

struct JointResult {
  std::vector<Mask> masks;
  ResidualTrace trace;
  std::vector<LayerState> states;
  double score_admm = 0.0;
  double score_projected = 0.0;
};

// Both constraints at once. The discreteness auxiliary is restricted to the
// support of the current pruning auxiliary. On termination W is hard-pruned
// and each layer's quantization interval refitted to the pruned weights;
// exact discreteness is left to the finalization procedures.
JointResult admm_joint(TrainingProblem& problem, const CompressionConfig& config,
                       const AdmmObserver& observer = {});

// Per-layer quantization specs taken from the states (unset for layers
// without a quantization constraint).
std::vector<std::optional<QuantSpec>> quant_specs(const std::vector<LayerState>& states);

}  // namespace admmc

#endif  // ADMMC_ADMM_HPP_
