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


#ifndef ADMMC_FINALIZE_HPP_
#define ADMMC_FINALIZE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "admmc/optimizer.hpp"
#include "admmc/problem.hpp"
#include "admmc/projection.hpp"
#include "admmc/tensor.hpp"

// Procedures that turn approximately compressed weights into exactly
// compressed ones: masked retraining after pruning, freeze-and-retrain
// quantization, and clustering with centroid-only retraining.
namespace admmc {

inline OptimizerConfig fine_tune_optimizer() {
  return OptimizerConfig{OptimizerKind::kAdam, 1e-4};
}

struct RetrainSchedule {
  double max_epochs = 10.0;
  double eval_every = 1.0;  // epochs between validation checks
  std::size_t patience = 3;
  OptimizerConfig optimizer = fine_tune_optimizer();
  void validate() const;
};

struct QuantizeSchedule {
  double freeze_fraction = 0.2;  // per level, of the currently free weights
  double retrain_epochs = 1.0;   // between freeze rounds
  double stop_fraction = 0.01;   // freeze the rest below this free share
  OptimizerConfig optimizer = fine_tune_optimizer();
  void validate() const;
};

struct ClusterSchedule {
  double retrain_epochs = 3.0;
  double eval_every = 1.0;
  OptimizerConfig optimizer = fine_tune_optimizer();
  KMeansOptions kmeans;
  void validate() const;
};

struct RetrainReport {
  double entry_score = 0.0;
  double best_score = 0.0;
  std::size_t evaluations = 0;
  std::size_t steps = 0;
};

// Trains weights under fixed masks (pruned entries stay exactly 0) and
// biases, evaluating every eval_every epochs; stops after `patience`
// evaluations without improvement and restores the best checkpoint, which
// includes the entry state.
RetrainReport masked_retrain(TrainingProblem& problem,
                             const std::vector<Mask>& masks,
                             const RetrainSchedule& schedule);

struct FreezeRecord {
  std::size_t round = 0;
  std::size_t layer = 0;
  std::size_t survivors = 0;
  std::size_t frozen = 0;
  double score = 0.0;  // validation score after the round's retraining
};

struct QuantizeReport {
  std::vector<FreezeRecord> log;
  std::size_t rounds = 0;
  double final_score = 0.0;
};

// Called after each round with the per-layer frozen flags.
using FreezeObserver =
    std::function<void(std::size_t round, const std::vector<Mask>& frozen,
                       const ParamList& params)>;

// Freeze-and-retrain quantization. Each round, for every level, the
// freeze_fraction of free weights nearest to that level are snapped onto it
// and frozen; the remaining free weights (and biases) are retrained. Once
// fewer than stop_fraction of the survivors are free, the rest are snapped.
// Layers with no spec are left untouched. Weights already exactly on a level
// are frozen immediately.
QuantizeReport iterative_quantize(TrainingProblem& problem,
                                  const std::vector<Mask>& masks,
                                  const std::vector<std::optional<QuantSpec>>& specs,
                                  const QuantizeSchedule& schedule,
                                  const FreezeObserver& observer = {});

void write_freeze_csv(const QuantizeReport& report, std::ostream& out);

// Sum of the weight gradients of every cluster's members.
std::vector<double> centroid_gradients(const Tensor& weight_grad,
                                       const ClusterSpec& spec);

// Writes each assigned entry's centroid into the weight tensor.
void apply_centroids(Tensor& weight, const ClusterSpec& spec);

struct ClusterReport {
  std::vector<std::optional<ClusterSpec>> specs;
  double entry_score = 0.0;  // right after snapping to the centroids
  double best_score = 0.0;
  std::vector<double> scores;  // after every evaluation
};

using ClusterObserver =
    std::function<void(std::size_t step, const ParamList& params,
                       const std::vector<std::optional<ClusterSpec>>& specs)>;

// Clusters each layer's surviving weights into cluster_counts[i] values
// (0 skips the layer), snaps them to the centroids, then retrains only the
// centroids (gradient = sum over members) and the biases. Assignments stay
// fixed. The best checkpoint by validation score is restored.
ClusterReport cluster_train_and_retrain(TrainingProblem& problem,
                                        const std::vector<Mask>& masks,
                                        const std::vector<std::size_t>& cluster_counts,
                                        const ClusterSchedule& schedule,
                                        std::uint64_t seed,
                                        const ClusterObserver& observer = {});

}  // namespace admmc

#endif  // ADMMC_FINALIZE_HPP_
