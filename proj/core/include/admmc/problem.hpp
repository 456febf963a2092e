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

#ifndef ADMMC_PROBLEM_HPP_
#define ADMMC_PROBLEM_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "admmc/dataset.hpp"
#include "admmc/network.hpp"
#include "admmc/optimizer.hpp"
#include "admmc/tensor.hpp"

namespace admmc {

// A differentiable objective over per-layer {weight, bias} parameters, fed in
// mini-batches. The ADMM engine and the retraining procedures only talk to
// this interface.
class TrainingProblem {
 public:
  virtual ~TrainingProblem() = default;

  virtual ParamList& params() = 0;
  virtual std::size_t steps_per_epoch() const = 0;
  // Mean loss and gradients on the next mini-batch; advances the cursor.
  virtual double next_batch(ParamList& grads) = 0;
  // Higher is better: accuracy for classifiers, -loss for regression.
  virtual double validation_score() = 0;
};

// Mini-batch softmax classification of a Network over a Dataset. Batch order
// is a fresh seeded permutation every epoch.
class ClassificationProblem final : public TrainingProblem {
 public:
  ClassificationProblem(Network& net, const Dataset& train,
                        const Dataset& validation, std::size_t batch_size,
                        std::uint64_t seed);

  ParamList& params() override { return net_.params(); }
  std::size_t steps_per_epoch() const override;
  double next_batch(ParamList& grads) override;
  double validation_score() override;

  Network& network() noexcept { return net_; }
  std::uint64_t epoch() const noexcept { return epoch_; }

 private:
  Network& net_;
  const Dataset& train_;
  const Dataset& validation_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::uint64_t epoch_ = 0;
  std::size_t cursor_ = 0;
  std::vector<std::size_t> order_;
};

double evaluate_accuracy(const Network& net, const Dataset& data,
                         std::size_t batch_size = 1000);

// Extra objective terms added on top of the batch loss: receives the current
// parameters, adds into the gradients, returns the term's value.
using PenaltyFn = std::function<double(const ParamList& params, ParamList& grads)>;

struct TrainOptions {
  // Per-layer weight masks; entries with 0 are frozen. Null: all trainable.
  const std::vector<Mask>* weight_masks = nullptr;
  PenaltyFn penalty;
  std::string phase = "training";
  std::size_t iteration = 0;
};

// Runs the given number of optimizer updates and returns the mean (augmented) loss.
// Throws DivergenceError when a loss or parameter turns non-finite.
double train_steps(TrainingProblem& problem, Optimizer& optimizer,
                   std::size_t steps, const TrainOptions& options = {});

// Whole steps covering a (possibly fractional) number of epochs.
std::size_t epochs_to_steps(double epochs, const TrainingProblem& problem);

// Copy of the current parameters.
ParamList snapshot(TrainingProblem& problem);

}  // namespace admmc

#endif  // ADMMC_PROBLEM_HPP_
