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

#include "admmc/optimizer.hpp"

#include <cmath>

#include "admmc/error.hpp"

namespace admmc {

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind optimizer_kind_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer kind \"" + name + "\" (sgd | adam)");
}

void OptimizerConfig::validate() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("optimizer.lr must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("optimizer.beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("optimizer.beta2 must be in [0, 1)");
  if (!(eps > 0.0)) throw ConfigError("optimizer.eps must be > 0");
}

Optimizer::Optimizer(OptimizerConfig config) : config_(config) { config_.validate(); }

void Optimizer::apply(std::span<const ParamSlot> slots) {
  for (const ParamSlot& slot : slots) {
    if (slot.grad.size() != slot.value.size() ||
        (!slot.mask.empty() && slot.mask.size() != slot.value.size())) {
      throw ConfigError("optimizer: gradient/mask size does not match parameter");
    }
  }
  ++step_;
  const float lr = static_cast<float>(config_.lr);

  if (config_.kind == OptimizerKind::kSgd) {
    for (const ParamSlot& slot : slots) {
      for (std::size_t i = 0; i < slot.value.size(); ++i) {
        if (!slot.mask.empty() && !slot.mask[i]) continue;
        slot.value[i] -= lr * slot.grad[i];
      }
    }
    return;
  }

  if (first_moment_.empty()) {
    for (const ParamSlot& slot : slots) {
      first_moment_.emplace_back(slot.value.size(), 0.0f);
      second_moment_.emplace_back(slot.value.size(), 0.0f);
    }
  }
  if (first_moment_.size() != slots.size()) {
    throw ConfigError("optimizer: slot count changed between steps");
  }
  const auto b1 = static_cast<float>(config_.beta1);
  const auto b2 = static_cast<float>(config_.beta2);
  const auto eps = static_cast<float>(config_.eps);
  const double t = static_cast<double>(step_);
  const auto correction1 = static_cast<float>(1.0 - std::pow(config_.beta1, t));
  const auto correction2 = static_cast<float>(1.0 - std::pow(config_.beta2, t));
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const ParamSlot& slot = slots[s];
    std::vector<float>& m = first_moment_[s];
    std::vector<float>& v = second_moment_[s];
    if (m.size() != slot.value.size()) {
      throw ConfigError("optimizer: parameter " + std::to_string(s) +
                        " changed size between steps");
    }
    for (std::size_t i = 0; i < slot.value.size(); ++i) {
      if (!slot.mask.empty() && !slot.mask[i]) continue;
      const float g = slot.grad[i];
      m[i] = b1 * m[i] + (1.0f - b1) * g;
      v[i] = b2 * v[i] + (1.0f - b2) * g * g;
      const float m_hat = m[i] / correction1;
      const float v_hat = v[i] / correction2;
      slot.value[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

}  // namespace admmc
