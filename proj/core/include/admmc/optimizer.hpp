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

#ifndef ADMMC_OPTIMIZER_HPP_
#define ADMMC_OPTIMIZER_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace admmc {

enum class OptimizerKind : std::uint8_t { kSgd, kAdam };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(const std::string& name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
};

// One parameter tensor's view for a single update. An empty mask means
// "update everything"; otherwise entries with mask 0 are left bit-exact and
// their Adam moments are not advanced.
struct ParamSlot {
  std::span<float> value;
  std::span<const float> grad;
  std::span<const std::uint8_t> mask = {};
};

class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config = {});

  // Applies one update to every slot. Slot i must keep its size across calls.
  void apply(std::span<const ParamSlot> slots);

  std::uint64_t step_count() const noexcept { return step_; }
  const OptimizerConfig& config() const noexcept { return config_; }

 private:
  OptimizerConfig config_;
  std::uint64_t step_ = 0;
  std::vector<std::vector<float>> first_moment_;
  std::vector<std::vector<float>> second_moment_;
};

}  // namespace admmc

#endif  // ADMMC_OPTIMIZER_HPP_
