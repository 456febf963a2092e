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


#include "admmc/admm.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "admmc/error.hpp"
#include "admmc/parallel.hpp"

namespace admmc {
namespace {

Tensor sum_of(const Tensor& a, const Tensor& b) {
  Tensor out = a;
  auto o = out.data();
  const auto bb = b.data();
  for (std::size_t j = 0; j < o.size(); ++j) o[j] += bb[j];
  return out;
}

// dual += w - aux, evaluated exactly as the residual is.
void dual_update(Tensor& dual, const Tensor& w, const Tensor& aux) {
  auto d = dual.data();
  const auto ww = w.data();
  const auto a = aux.data();
  for (std::size_t j = 0; j < d.size(); ++j) d[j] += ww[j] - a[j];
}

bool discrete_on(const CompressionConfig& config, const LayerTarget& target) {
  return config.discrete != DiscreteKind::kNone && target.bits > 0;
}

// Projects `source` onto the layer's discreteness set within `support`,
// updating cluster centroids as a side effect.
Tensor project_discrete(const Tensor& source, LayerState& state) {
  if (state.quant) return project_quantize(source, *state.quant, state.support);
  ClusterProjection p = project_cluster(source, *state.cluster, state.support);
  state.cluster = std::move(p.spec);
  return std::move(p.projected);
}

std::vector<LayerState> init_states(const ParamList& params,
                                    const CompressionConfig& config,
                                    AdmmTerms terms,
                                    const std::vector<Mask>* masks) {
  std::vector<LayerState> states(params.size());
  for (std::size_t l = 0; l < params.size(); ++l) {
    const Tensor& w = params[l].weight;
    const LayerTarget& target = config.layers[l];
    LayerState& s = states[l];
    s.eps = target.eps > 0.0 ? target.eps : 1e-3 * squared_norm(w.data());
    Mask z_mask;
    if (terms.sparsity) {
      SparsityProjection p = project_sparsity(w, target.alpha);
      s.z = std::move(p.projected);
      z_mask = std::move(p.mask);
      s.u = Tensor(w.shape());
    }
    if (terms.discrete && discrete_on(config, target)) {
      s.support = masks ? (*masks)[l] : z_mask;
      const std::size_t m = target.level_count();
      if (config.discrete == DiscreteKind::kQuantize) {
        s.quant = QuantSpec(m, static_cast<float>(fit_interval(w, s.support, m)));
      } else {
        CentroidInit init =
            init_centroids(w, s.support, m, config.seed + l, config.cluster.kmeans);
        s.cluster = ClusterSpec{std::move(init.centroids), {}};
      }
      s.y = project_discrete(w, s);
      s.v = Tensor(w.shape());
    }
  }
  return states;
}

struct EngineRun {
  ResidualTrace trace;
  std::vector<LayerState> states;
};

EngineRun run_admm(TrainingProblem& problem, const CompressionConfig& config,
                   AdmmTerms terms, const std::vector<Mask>* masks,
                   const std::string& phase, const AdmmObserver& observer) {
  ParamList& params = problem.params();
  config.validate(params);
  if (masks && masks->size() != params.size()) {
    throw ConfigError("mask count does not match trainable layer count");
  }
  EngineRun run{{}, init_states(params, config, terms, masks)};
  std::vector<LayerState>& states = run.states;
  std::vector<double> eps(states.size());
  for (std::size_t l = 0; l < states.size(); ++l) eps[l] = states[l].eps;

  Optimizer optimizer(config.admm.optimizer);
  TrainOptions options;
  options.weight_masks = masks;
  options.phase = phase;
  options.penalty = [&](const ParamList& p, ParamList& grads) {
    return add_penalty_terms(p, states, config.layers, terms, grads);
  };
  const std::size_t steps = epochs_to_steps(config.admm.epochs_per_iteration, problem);
  const bool joint = terms.sparsity && terms.discrete;

  for (std::size_t k = 1; k <= config.admm.max_iterations; ++k) {
    options.iteration = k;
    train_steps(problem, optimizer, steps, options);

    std::vector<LayerState> before;
    if (observer) before = states;
    std::vector<ResidualRow> rows(states.size());
    parallel_for(states.size(), [&](std::size_t l) {
      const Tensor& w = params[l].weight;
      LayerState& s = states[l];
      ResidualRow& row = rows[l];
      row.iteration = k;
      row.layer = l;
      if (terms.sparsity) {
        SparsityProjection p = project_sparsity(sum_of(w, s.u), config.layers[l].alpha);
        row.z_drift = squared_distance(p.projected.data(), s.z.data());
        s.z = std::move(p.projected);
        if (joint && !s.y.empty()) s.support = std::move(p.mask);
        dual_update(s.u, w, s.z);
        row.w_minus_z = squared_distance(w.data(), s.z.data());
      }
      if (terms.discrete && !s.y.empty()) {
        Tensor y = project_discrete(sum_of(w, s.v), s);
        row.y_drift = squared_distance(y.data(), s.y.data());
        s.y = std::move(y);
        dual_update(s.v, w, s.y);
        row.w_minus_y = squared_distance(w.data(), s.y.data());
      }
    });
    run.trace.rows.insert(run.trace.rows.end(), rows.begin(), rows.end());
    run.trace.iterations = k;
    if (observer) observer(AdmmStep{k, before, states, params});
    if (check_convergence(rows, eps)) {
      run.trace.converged = true;
      break;
    }
  }
  return run;
}

// Hard-prunes every layer to its alpha largest magnitudes.
std::vector<Mask> hard_prune(ParamList& params, const CompressionConfig& config) {
  std::vector<Mask> masks(params.size());
  for (std::size_t l = 0; l < params.size(); ++l) {
    SparsityProjection p = project_sparsity(params[l].weight, config.layers[l].alpha);
    params[l].weight = std::move(p.projected);
    masks[l] = std::move(p.mask);
  }
  return masks;
}

}  // namespace

std::string to_string(AdmmMode mode) {
  return mode == AdmmMode::kJoint ? "joint" : "sequential";
}

std::string to_string(DiscreteKind kind) {
  switch (kind) {
    case DiscreteKind::kNone: return "none";
    case DiscreteKind::kQuantize: return "quantize";
    case DiscreteKind::kCluster: return "cluster";
  }
  return "unknown";
}

AdmmMode admm_mode_from_string(const std::string& name) {
  if (name == "sequential") return AdmmMode::kSequential;
  if (name == "joint") return AdmmMode::kJoint;
  throw ConfigError("unknown ADMM mode '" + name + "'");
}

DiscreteKind discrete_kind_from_string(const std::string& name) {
  if (name == "none") return DiscreteKind::kNone;
  if (name == "quantize") return DiscreteKind::kQuantize;
  if (name == "cluster") return DiscreteKind::kCluster;
  throw ConfigError("unknown discreteness kind '" + name + "'");
}

void CompressionConfig::validate(const ParamList& params) const {
  if (layers.size() != params.size()) {
    throw ConfigError("config lists " + std::to_string(layers.size()) +
                      " layers but the model has " + std::to_string(params.size()) +
                      " trainable layers");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerTarget& t = layers[l];
    const std::string where = "layer " + std::to_string(l) + ": ";
    if (t.alpha > params[l].weight.numel()) {
      throw ConfigError(where + "alpha " + std::to_string(t.alpha) +
                        " exceeds weight count " +
                        std::to_string(params[l].weight.numel()));
    }
    if (t.bits > 16) throw ConfigError(where + "bits must lie in [0, 16]");
    if (!(t.rho >= 0.0) || !std::isfinite(t.rho)) {
      throw ConfigError(where + "rho must be finite and >= 0");
    }
    if (std::isnan(t.eps)) throw ConfigError(where + "eps is NaN");
  }
  if (!(admm.epochs_per_iteration >= 0.0) || !std::isfinite(admm.epochs_per_iteration)) {
    throw ConfigError("admm.epochs_per_iter must be finite and >= 0");
  }
  admm.optimizer.validate();
  retrain.validate();
  quantize.validate();
  cluster.validate();
}

std::span<const ResidualRow> ResidualTrace::iteration(std::size_t k) const {
  auto first = std::find_if(rows.begin(), rows.end(),
                            [k](const ResidualRow& r) { return r.iteration == k; });
  auto last = std::find_if(first, rows.end(),
                           [k](const ResidualRow& r) { return r.iteration != k; });
  return {first, last};
}

void write_residual_csv(const ResidualTrace& trace, std::ostream& out) {
  auto cell = [&](const std::optional<double>& v) {
    out << ',';
    if (v) out << *v;
  };
  out << "iteration,layer,w_minus_z,z_drift,w_minus_y,y_drift\n";
  out.precision(9);
  for (const auto& r : trace.rows) {
    out << r.iteration << ',' << r.layer;
    cell(r.w_minus_z);
    cell(r.z_drift);
    cell(r.w_minus_y);
    cell(r.y_drift);
    out << '\n';
  }
}

bool check_convergence(std::span<const ResidualRow> rows,
                       std::span<const double> eps) {
  for (const auto& r : rows) {
    const double e = eps[r.layer];
    for (const auto& v : {r.w_minus_z, r.z_drift, r.w_minus_y, r.y_drift}) {
      if (v && !(*v <= e)) return false;
    }
  }
  return true;
}

double add_penalty_terms(const ParamList& params,
                         const std::vector<LayerState>& states,
                         const std::vector<LayerTarget>& targets,
                         AdmmTerms terms, ParamList& grads) {
  if (states.size() != params.size() || targets.size() != params.size() ||
      grads.size() != params.size()) {
    throw ConfigError("penalty: state, target and parameter counts differ");
  }
  double value = 0.0;
  for (std::size_t l = 0; l < params.size(); ++l) {
    const double rho = targets[l].rho;
    if (rho == 0.0) continue;
    const auto w = params[l].weight.data();
    auto g = grads[l].weight.data();
    auto add = [&](const Tensor& aux, const Tensor& dual) {
      if (aux.numel() != w.size() || dual.numel() != w.size() || g.size() != w.size()) {
        throw ConfigError("penalty: layer " + std::to_string(l) + " shape mismatch");
      }
      double sq = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) {
        const float d = w[j] - aux[j] + dual[j];
        sq += static_cast<double>(d) * d;
        g[j] += static_cast<float>(rho) * d;
      }
      value += 0.5 * rho * sq;
    };
    if (terms.sparsity && !states[l].z.empty()) add(states[l].z, states[l].u);
    if (terms.discrete && !states[l].y.empty()) add(states[l].y, states[l].v);
  }
  return value;
}

double augmented_grads(TrainingProblem& problem,
                       const std::vector<LayerState>& states,
                       const std::vector<LayerTarget>& targets, AdmmTerms terms,
                       ParamList& grads) {
  const double loss = problem.next_batch(grads);
  return loss + add_penalty_terms(problem.params(), states, targets, terms, grads);
}

PruneResult admm_prune(TrainingProblem& problem, const CompressionConfig& config,
                       const AdmmObserver& observer) {
  EngineRun run = run_admm(problem, config, {.sparsity = true, .discrete = false},
                           nullptr, "ADMM pruning", observer);
  PruneResult result;
  result.trace = std::move(run.trace);
  result.states = std::move(run.states);
  result.score_admm = problem.validation_score();
  result.masks = hard_prune(problem.params(), config);
  result.score_projected = problem.validation_score();
  result.retrain = masked_retrain(problem, result.masks, config.retrain);
  return result;
}

DiscretizeResult admm_discretize(TrainingProblem& problem,
                                 const std::vector<Mask>& masks,
                                 const CompressionConfig& config,
                                 const AdmmObserver& observer) {
  if (config.discrete == DiscreteKind::kNone) {
    throw ConfigError("discretization needs discrete = quantize or cluster");
  }
  EngineRun run = run_admm(problem, config, {.sparsity = false, .discrete = true},
                           &masks, "ADMM discretization", observer);
  return {std::move(run.trace), std::move(run.states), problem.validation_score()};
}

JointResult admm_joint(TrainingProblem& problem, const CompressionConfig& config,
                       const AdmmObserver& observer) {
  const bool discrete = config.discrete != DiscreteKind::kNone;
  EngineRun run = run_admm(problem, config, {.sparsity = true, .discrete = discrete},
                           nullptr, "joint ADMM", observer);
  JointResult result;
  result.trace = std::move(run.trace);
  result.states = std::move(run.states);
  result.score_admm = problem.validation_score();
  ParamList& params = problem.params();
  result.masks = hard_prune(params, config);
  for (std::size_t l = 0; l < params.size(); ++l) {
    LayerState& s = result.states[l];
    if (!s.quant) continue;
    if (count_ones(result.masks[l]) == 0 || params[l].weight.count_nonzero() == 0) continue;
    s.quant = QuantSpec(s.quant->level_count(),
                        static_cast<float>(fit_interval(params[l].weight, result.masks[l],
                                                        s.quant->level_count())));
  }
  result.score_projected = problem.validation_score();
  return result;
}

std::vector<std::optional<QuantSpec>> quant_specs(const std::vector<LayerState>& states) {
  std::vector<std::optional<QuantSpec>> specs;
  specs.reserve(states.size());
  for (const auto& s : states) specs.push_back(s.quant);
  return specs;
}

}  // namespace admmc
