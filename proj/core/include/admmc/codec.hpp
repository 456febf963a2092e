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


#ifndef ADMMC_CODEC_HPP_
#define ADMMC_CODEC_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "admmc/network.hpp"
#include "admmc/projection.hpp"
#include "admmc/tensor.hpp"

// Compressed model stream (.admmc), all integers little-endian:
//
//   "ADMMCMP1"
//   architecture table, identical to the checkpoint header: input shape,
//   layer count, per layer kind tag, dims and stride
//   per trainable layer:
//     u32 survivor count
//     u32 nibble count, then ceil(nibbles / 2) bytes of index nibbles
//         (low nibble first). A nibble g < 15 means "skip g zeros, then one
//         survivor"; 15 means "skip 15 zeros" with no survivor.
//     u8  codebook kind, u8 bits
//         quant:   f32 interval q (levels are rebuilt as k * q)
//         cluster: u32 entry count, f32 entries (strictly increasing)
//         raw:     nothing; codes are the f32 survivor values
//     ceil(survivors * bits / 8) bytes of codes, LSB-first bit packing
//     f32 biases
namespace admmc {

inline constexpr char kCompressedMagic[] = "ADMMCMP1";

enum class CodebookKind : std::uint8_t { kQuant = 0, kCluster = 1, kRaw = 2 };

std::string to_string(CodebookKind kind);

// Representative values of one layer; surviving weights are stored as
// indices into `entries`.
struct Codebook {
  CodebookKind kind = CodebookKind::kRaw;
  std::uint32_t bits = 32;
  float interval = 0.0f;       // quant only
  std::vector<float> entries;  // ascending; empty for raw

  static Codebook quantization(const QuantSpec& spec);
  // Distinct surviving values of the layer; throws ExactnessError if there
  // are more than 2^bits of them.
  static Codebook clustering(const Tensor& weight, const Mask& mask,
                             std::uint32_t bits);
  static Codebook raw();

  // Index of the entry bit-identical to value, or -1.
  long index_of(float value) const;
  // Bytes of codebook payload: 4 for quant (q), 4 per cluster entry, 0 raw.
  std::size_t payload_bytes() const;
  void validate() const;  // throws ConfigError
  friend bool operator==(const Codebook&, const Codebook&) = default;
};

// Relative index stream of a mask (one nibble per element of the result).
std::vector<std::uint8_t> encode_index_nibbles(const Mask& mask);
Mask decode_index_nibbles(std::span<const std::uint8_t> nibbles,
                          std::size_t numel, std::size_t survivors);

// n-bit LSB-first packing.
std::vector<std::uint8_t> pack_codes(std::span<const std::uint32_t> codes,
                                     std::uint32_t bits);
std::vector<std::uint32_t> unpack_codes(std::span<const std::uint8_t> bytes,
                                        std::size_t count, std::uint32_t bits);

struct LayerSizes {
  std::size_t numel = 0;
  std::size_t survivors = 0;
  std::uint32_t bits = 0;
  std::size_t index_bytes = 0;
  std::size_t codebook_bytes = 0;  // payload only
  std::size_t code_bytes = 0;
  std::size_t bias_bytes = 0;
};

struct SizeBreakdown {
  std::vector<LayerSizes> layers;
  std::size_t header_bytes = 0;  // magic, architecture, per-layer framing
  std::size_t total_bytes = 0;   // equals the encoded stream length
};

// Exact byte accounting of encode() without producing the stream.
SizeBreakdown measure(const Network& net, const std::vector<Mask>& masks,
                      const std::vector<Codebook>& codebooks);

// Throws ExactnessError when a surviving weight is not bit-identical to one
// of its layer's codebook entries or a pruned weight is nonzero, and
// ConfigError on count or shape mismatches.
std::vector<std::uint8_t> encode_model(const Network& net,
                                       const std::vector<Mask>& masks,
                                       const std::vector<Codebook>& codebooks);

struct DecodedModel {
  Network net;
  std::vector<Mask> masks;
  std::vector<Codebook> codebooks;
};

// Throws FormatError on bad magic, truncation, out-of-range codes and
// inconsistent index streams, each with its own message.
DecodedModel decode_model(std::span<const std::uint8_t> bytes);

void save_compressed(const std::string& path, const Network& net,
                     const std::vector<Mask>& masks,
                     const std::vector<Codebook>& codebooks);
DecodedModel load_compressed(const std::string& path);

}  // namespace admmc

#endif  // ADMMC_CODEC_HPP_
