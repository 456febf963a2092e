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


#include "admmc/finalize.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "admmc/error.hpp"

namespace admmc {
namespace {

void require_layer_count(const ParamList& params, std::size_t count,
                         const char* what) {
  if (count != params.size()) {
    throw ConfigError(std::string(what) + ": expected " +
                      std::to_string(params.size()) + " entries, got " +
                      std::to_string(count));
  }
}

void require_mask_sizes(const ParamList& params, const std::vector<Mask>& masks) {
  require_layer_count(params, masks.size(), "masks");
  for (std::size_t l = 0; l < params.size(); ++l) {
    if (!masks[l].empty() && masks[l].size() != params[l].weight.numel()) {
      throw ConfigError("mask of layer " + std::to_string(l) +
                        " does not match its weight count");
    }
  }
}

bool kept(const Mask& mask, std::size_t j) { return mask.empty() || mask[j]; }

// Zeroes every masked-out weight.
void apply_masks(ParamList& params, const std::vector<Mask>& masks) {
  for (std::size_t l = 0; l < params.size(); ++l) {
    if (masks[l].empty()) continue;
    auto w = params[l].weight.data();
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (!masks[l][j]) w[j] = 0.0f;
    }
  }
}

void check_epochs(double epochs, const char* what) {
  if (!(epochs >= 0.0) || !std::isfinite(epochs)) {
    throw ConfigError(std::string(what) + " must be finite and >= 0");
  }
}

}  // namespace

void RetrainSchedule::validate() const {
  check_epochs(max_epochs, "retrain.max_epochs");
  if (!(eval_every > 0.0) || !std::isfinite(eval_every)) {
    throw ConfigError("retrain.eval_every must be > 0");
  }
  optimizer.validate();
}

void QuantizeSchedule::validate() const {
  if (!(freeze_fraction > 0.0 && freeze_fraction <= 1.0)) {
    throw ConfigError("quantize.freeze_fraction must lie in (0, 1]");
  }
  check_epochs(retrain_epochs, "quantize.retrain_epochs");
  if (!(stop_fraction >= 0.0 && stop_fraction < 1.0)) {
    throw ConfigError("quantize.stop_fraction must lie in [0, 1)");
  }
  optimizer.validate();
}

void ClusterSchedule::validate() const {
  check_epochs(retrain_epochs, "cluster.retrain_epochs");
  if (!(eval_every > 0.0) || !std::isfinite(eval_every)) {
    throw ConfigError("cluster.eval_every must be > 0");
  }
  if (kmeans.restarts == 0 || kmeans.max_iterations == 0) {
    throw ConfigError("cluster.kmeans needs >= 1 restart and iteration");
  }
  optimizer.validate();
}

RetrainReport masked_retrain(TrainingProblem& problem,
                             const std::vector<Mask>& masks,
                             const RetrainSchedule& schedule) {
  schedule.validate();
  ParamList& params = problem.params();
  require_mask_sizes(params, masks);
  apply_masks(params, masks);

  RetrainReport report;
  report.entry_score = report.best_score = problem.validation_score();
  const std::size_t total = epochs_to_steps(schedule.max_epochs, problem);
  if (total == 0) return report;
  const std::size_t chunk =
      std::max<std::size_t>(1, epochs_to_steps(schedule.eval_every, problem));

  ParamList best = params;
  Optimizer optimizer(schedule.optimizer);
  TrainOptions options;
  options.weight_masks = &masks;
  options.phase = "masked retraining";
  std::size_t stale = 0;
  while (report.steps < total && stale < schedule.patience) {
    const std::size_t steps = std::min(chunk, total - report.steps);
    options.iteration = report.evaluations;
    train_steps(problem, optimizer, steps, options);
    report.steps += steps;
    const double score = problem.validation_score();
    ++report.evaluations;
    if (score > report.best_score) {
      report.best_score = score;
      best = params;
      stale = 0;
    } else {
      ++stale;
    }
  }
  params = std::move(best);
  return report;
}

QuantizeReport iterative_quantize(TrainingProblem& problem,
                                  const std::vector<Mask>& masks,
                                  const std::vector<std::optional<QuantSpec>>& specs,
                                  const QuantizeSchedule& schedule,
                                  const FreezeObserver& observer) {
  schedule.validate();
  ParamList& params = problem.params();
  require_mask_sizes(params, masks);
  require_layer_count(params, specs.size(), "quantization specs");
  apply_masks(params, masks);

  const std::size_t layers = params.size();
  std::vector<Mask> frozen(layers);
  std::vector<std::size_t> survivors(layers, 0);
  std::size_t total_survivors = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    if (!specs[l]) continue;
    const auto w = params[l].weight.data();
    frozen[l].assign(w.size(), 0);
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (!kept(masks[l], j)) continue;
      ++survivors[l];
      if (w[j] == specs[l]->nearest(w[j])) frozen[l][j] = 1;
    }
    total_survivors += survivors[l];
  }

  auto free_count = [&] {
    std::size_t n = 0;
    for (std::size_t l = 0; l < layers; ++l) {
      if (specs[l]) n += survivors[l] - count_ones(frozen[l]);
    }
    return n;
  };
  auto snap = [&](std::size_t l, std::size_t j) {
    float& w = params[l].weight[j];
    w = specs[l]->nearest(w);
    frozen[l][j] = 1;
  };

  // Retraining masks: surviving and not yet frozen.
  std::vector<Mask> trainable(masks);
  Optimizer optimizer(schedule.optimizer);
  TrainOptions options;
  options.weight_masks = &trainable;
  options.phase = "quantization retraining";
  const std::size_t retrain_steps = epochs_to_steps(schedule.retrain_epochs, problem);

  QuantizeReport report;
  for (std::size_t round = 1;; ++round) {
    // Freeze the nearest fraction of free weights at every level.
    for (std::size_t l = 0; l < layers; ++l) {
      if (!specs[l]) continue;
      const QuantSpec& spec = *specs[l];
      const auto w = params[l].weight.data();
      std::vector<std::vector<std::size_t>> by_level(spec.level_count());
      for (std::size_t j = 0; j < w.size(); ++j) {
        if (!kept(masks[l], j) || frozen[l][j]) continue;
        const int k = spec.nearest_index(w[j]);
        const std::size_t slot =
            static_cast<std::size_t>(k < 0 ? k + static_cast<int>(spec.half())
                                           : k - 1 + static_cast<int>(spec.half()));
        by_level[slot].push_back(j);
      }
      for (auto& members : by_level) {
        auto distance = [&](std::size_t j) {
          return std::fabs(static_cast<double>(w[j]) - spec.nearest(w[j]));
        };
        const auto take = static_cast<std::size_t>(
            std::ceil(schedule.freeze_fraction * static_cast<double>(members.size())));
        std::stable_sort(members.begin(), members.end(),
                         [&](std::size_t a, std::size_t b) { return distance(a) < distance(b); });
        for (std::size_t i = 0; i < take && i < members.size(); ++i) snap(l, members[i]);
      }
    }

    std::size_t remaining = free_count();
    const bool last = remaining == 0 || static_cast<double>(remaining) <
                                            schedule.stop_fraction *
                                                static_cast<double>(total_survivors);
    if (last) {
      for (std::size_t l = 0; l < layers; ++l) {
        if (!specs[l]) continue;
        for (std::size_t j = 0; j < frozen[l].size(); ++j) {
          if (kept(masks[l], j) && !frozen[l][j]) snap(l, j);
        }
      }
    } else {
      for (std::size_t l = 0; l < layers; ++l) {
        if (!specs[l]) continue;
        trainable[l].assign(frozen[l].size(), 0);
        for (std::size_t j = 0; j < frozen[l].size(); ++j) {
          trainable[l][j] = kept(masks[l], j) && !frozen[l][j];
        }
      }
      options.iteration = round;
      train_steps(problem, optimizer, retrain_steps, options);
    }

    const double score = problem.validation_score();
    for (std::size_t l = 0; l < layers; ++l) {
      if (!specs[l]) continue;
      report.log.push_back({round, l, survivors[l], count_ones(frozen[l]), score});
    }
    if (observer) observer(round, frozen, params);
    report.rounds = round;
    report.final_score = score;
    if (last) break;
  }
  return report;
}

void write_freeze_csv(const QuantizeReport& report, std::ostream& out) {
  out << "round,layer,survivors,frozen,score\n";
  for (const auto& r : report.log) {
    out << r.round << ',' << r.layer << ',' << r.survivors << ',' << r.frozen
        << ',' << r.score << '\n';
  }
}

std::vector<double> centroid_gradients(const Tensor& weight_grad,
                                       const ClusterSpec& spec) {
  if (spec.assignment.size() != weight_grad.numel()) {
    throw ConfigError("cluster assignment does not match the gradient size");
  }
  std::vector<double> sums(spec.centroids.size(), 0.0);
  for (std::size_t j = 0; j < spec.assignment.size(); ++j) {
    const std::uint32_t c = spec.assignment[j];
    if (c != kUnassigned) sums.at(c) += weight_grad[j];
  }
  return sums;
}

void apply_centroids(Tensor& weight, const ClusterSpec& spec) {
  if (spec.assignment.size() != weight.numel()) {
    throw ConfigError("cluster assignment does not match the weight size");
  }
  for (std::size_t j = 0; j < spec.assignment.size(); ++j) {
    const std::uint32_t c = spec.assignment[j];
    weight[j] = c == kUnassigned ? 0.0f : spec.centroids.at(c);
  }
}

ClusterReport cluster_train_and_retrain(TrainingProblem& problem,
                                        const std::vector<Mask>& masks,
                                        const std::vector<std::size_t>& cluster_counts,
                                        const ClusterSchedule& schedule,
                                        std::uint64_t seed,
                                        const ClusterObserver& observer) {
  schedule.validate();
  ParamList& params = problem.params();
  require_mask_sizes(params, masks);
  require_layer_count(params, cluster_counts.size(), "cluster counts");
  apply_masks(params, masks);

  const std::size_t layers = params.size();
  ClusterReport report;
  report.specs.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t m = cluster_counts[l];
    if (m == 0) continue;
    Tensor& w = params[l].weight;
    CentroidInit init = init_centroids(w, masks[l], m, seed + l, schedule.kmeans);
    ClusterSpec spec{std::move(init.centroids),
                     std::vector<std::uint32_t>(w.numel(), kUnassigned)};
    std::vector<double> sum(m, 0.0);
    std::vector<std::size_t> count(m, 0);
    for (std::size_t j = 0; j < w.numel(); ++j) {
      if (!kept(masks[l], j)) continue;
      std::uint32_t best = 0;
      for (std::uint32_t c = 1; c < m; ++c) {
        if (std::fabs(w[j] - spec.centroids[c]) < std::fabs(w[j] - spec.centroids[best])) {
          best = c;
        }
      }
      spec.assignment[j] = best;
      sum[best] += w[j];
      ++count[best];
    }
    for (std::size_t c = 0; c < m; ++c) {
      if (count[c]) spec.centroids[c] = static_cast<float>(sum[c] / static_cast<double>(count[c]));
    }
    apply_centroids(w, spec);
    report.specs[l] = std::move(spec);
  }

  report.entry_score = report.best_score = problem.validation_score();
  const std::size_t total = epochs_to_steps(schedule.retrain_epochs, problem);
  const std::size_t chunk =
      std::max<std::size_t>(1, epochs_to_steps(schedule.eval_every, problem));
  ParamList best_params = params;
  auto best_specs = report.specs;

  Optimizer optimizer(schedule.optimizer);
  ParamList grads;
  std::vector<std::vector<float>> centroid_grads(layers);
  std::vector<ParamSlot> slots;
  for (std::size_t step = 0; step < total; ++step) {
    const double loss = problem.next_batch(grads);
    if (!std::isfinite(loss)) throw DivergenceError("centroid retraining", step);
    slots.clear();
    for (std::size_t l = 0; l < layers; ++l) {
      if (report.specs[l]) {
        const auto sums = centroid_gradients(grads[l].weight, *report.specs[l]);
        centroid_grads[l].assign(sums.begin(), sums.end());
        slots.push_back({report.specs[l]->centroids, centroid_grads[l], {}});
      } else {
        std::span<const std::uint8_t> mask;
        if (!masks[l].empty()) mask = masks[l];
        slots.push_back({params[l].weight.data(), grads[l].weight.data(), mask});
      }
      slots.push_back({params[l].bias.data(), grads[l].bias.data(), {}});
    }
    optimizer.apply(slots);
    for (std::size_t l = 0; l < layers; ++l) {
      if (report.specs[l]) apply_centroids(params[l].weight, *report.specs[l]);
    }
    for (const auto& p : params) {
      if (!p.weight.all_finite() || !p.bias.all_finite()) {
        throw DivergenceError("centroid retraining", step);
      }
    }
    if (observer) observer(step, params, report.specs);
    if ((step + 1) % chunk == 0 || step + 1 == total) {
      const double score = problem.validation_score();
      report.scores.push_back(score);
      if (score > report.best_score) {
        report.best_score = score;
        best_params = params;
        best_specs = report.specs;
      }
    }
  }
  params = std::move(best_params);
  report.specs = std::move(best_specs);
  return report;
}

}  // namespace admmc
