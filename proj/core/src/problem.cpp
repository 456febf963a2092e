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

#include "admmc/problem.hpp"

#include <algorithm>
#include <cmath>

#include "admmc/error.hpp"

namespace admmc {

ClassificationProblem::ClassificationProblem(Network& net, const Dataset& train,
                                             const Dataset& validation,
                                             std::size_t batch_size,
                                             std::uint64_t seed)
    : net_(net),
      train_(train),
      validation_(validation),
      batch_size_(batch_size),
      seed_(seed) {
  if (batch_size_ == 0) throw ConfigError("batch size must be >= 1");
  if (train_.size() == 0) throw ConfigError("training set is empty");
  if (train_.sample_shape != net_.input_shape() &&
      train_.feature_dim() != shape_numel(net_.input_shape())) {
    throw ConfigError("dataset samples " + shape_to_string(train_.sample_shape) +
                      " do not fit network input " +
                      shape_to_string(net_.input_shape()));
  }
}

std::size_t ClassificationProblem::steps_per_epoch() const {
  return (train_.size() + batch_size_ - 1) / batch_size_;
}

double ClassificationProblem::next_batch(ParamList& grads) {
  if (cursor_ == 0) {
    order_ = seeded_permutation(train_.size(),
                                seed_ ^ (0x9e3779b97f4a7c15ULL * (epoch_ + 1)));
  }
  const std::size_t end = std::min(cursor_ + batch_size_, train_.size());
  const std::span<const std::size_t> rows(order_.data() + cursor_, end - cursor_);
  Tensor batch = train_.gather(rows);
  Shape shape{rows.size()};
  shape.insert(shape.end(), net_.input_shape().begin(), net_.input_shape().end());
  batch.reshape(std::move(shape));
  const std::vector<std::int32_t> labels = train_.gather_labels(rows);
  cursor_ = end;
  if (cursor_ == train_.size()) {
    cursor_ = 0;
    ++epoch_;
  }
  return net_.loss_and_grads(batch, labels, grads);
}

double ClassificationProblem::validation_score() {
  return evaluate_accuracy(net_, validation_);
}

double evaluate_accuracy(const Network& net, const Dataset& data,
                         std::size_t batch_size) {
  if (data.size() == 0) return 0.0;
  std::size_t correct = 0;
  std::vector<std::size_t> rows;
  for (std::size_t begin = 0; begin < data.size(); begin += batch_size) {
    const std::size_t end = std::min(begin + batch_size, data.size());
    rows.resize(end - begin);
    for (std::size_t i = begin; i < end; ++i) rows[i - begin] = i;
    Tensor batch = data.gather(rows);
    Shape shape{rows.size()};
    shape.insert(shape.end(), net.input_shape().begin(), net.input_shape().end());
    batch.reshape(std::move(shape));
    const auto predicted = net.predict(batch);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      correct += predicted[i] == data.labels[rows[i]];
    }
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double train_steps(TrainingProblem& problem, Optimizer& optimizer,
                   std::size_t steps, const TrainOptions& options) {
  ParamList& params = problem.params();
  if (options.weight_masks && options.weight_masks->size() != params.size()) {
    throw ConfigError("weight mask count does not match trainable layer count");
  }
  ParamList grads;
  std::vector<ParamSlot> slots;
  double total = 0.0;
  for (std::size_t s = 0; s < steps; ++s) {
    double loss = problem.next_batch(grads);
    if (options.penalty) loss += options.penalty(params, grads);
    if (!std::isfinite(loss)) throw DivergenceError(options.phase, options.iteration);
    slots.clear();
    for (std::size_t l = 0; l < params.size(); ++l) {
      std::span<const std::uint8_t> mask;
      if (options.weight_masks && !(*options.weight_masks)[l].empty()) {
        mask = (*options.weight_masks)[l];
      }
      slots.push_back({params[l].weight.data(), grads[l].weight.data(), mask});
      slots.push_back({params[l].bias.data(), grads[l].bias.data(), {}});
    }
    optimizer.apply(slots);
    total += loss;
  }
  for (const auto& p : params) {
    if (!p.weight.all_finite() || !p.bias.all_finite()) {
      throw DivergenceError(options.phase, options.iteration);
    }
  }
  return steps ? total / static_cast<double>(steps) : 0.0;
}

std::size_t epochs_to_steps(double epochs, const TrainingProblem& problem) {
  if (!(epochs >= 0.0) || !std::isfinite(epochs)) {
    throw ConfigError("epoch count must be finite and >= 0");
  }
  return static_cast<std::size_t>(
      std::llround(epochs * static_cast<double>(problem.steps_per_epoch())));
}

ParamList snapshot(TrainingProblem& problem) {
  return problem.params();
}

}  // namespace admmc
