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

#ifndef ADMMC_CHECKPOINT_HPP_
#define ADMMC_CHECKPOINT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "admmc/network.hpp"

namespace admmc {

// Network checkpoint, all integers little-endian:
//
//   "ADMMNET1"
//   u32 input rank, u32 x rank input dims
//   u32 layer count
//   per layer:
//     u8  kind tag (LayerKind)
//     u32 rank, u32 x rank dims   weight shape; (window, window) for maxpool;
//                                 rank 0 for relu/flatten
//     u32 stride
//     f32 x numel(W), f32 x out   trainable layers only, weight then bias
inline constexpr char kCheckpointMagic[] = "ADMMNET1";

std::vector<std::uint8_t> serialize_network(const Network& net);
Network deserialize_network(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Network& net, const std::string& path);
Network load_checkpoint(const std::string& path);

}  // namespace admmc

#endif  // ADMMC_CHECKPOINT_HPP_
