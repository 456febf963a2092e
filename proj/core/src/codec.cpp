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


#include "admmc/codec.hpp"

#include <algorithm>
#include <bit>
#include <string_view>

#include "admmc/error.hpp"
#include "wire.hpp"

namespace admmc {
namespace {

constexpr std::uint8_t kEscape = 15;

std::size_t shape_bytes(const Shape& shape) { return 4 + 4 * shape.size(); }

std::size_t layer_header_bytes(const LayerSpec& layer) {
  std::size_t rank = 0;
  switch (layer.kind) {
    case LayerKind::kDense:
    case LayerKind::kConv2d: rank = layer.weight_shape().size(); break;
    case LayerKind::kMaxPool: rank = 2; break;
    case LayerKind::kRelu:
    case LayerKind::kFlatten: rank = 0; break;
  }
  return 1 + 4 + 4 * rank + 4;
}

void check_layout(const Network& net, const std::vector<Mask>& masks,
                  const std::vector<Codebook>& codebooks) {
  const ParamList& params = net.params();
  if (masks.size() != params.size() || codebooks.size() != params.size()) {
    throw ConfigError("encode: need one mask and one codebook per trainable layer (" +
                      std::to_string(params.size()) + "), got " +
                      std::to_string(masks.size()) + " and " +
                      std::to_string(codebooks.size()));
  }
  for (std::size_t l = 0; l < params.size(); ++l) {
    if (masks[l].size() != params[l].weight.numel()) {
      throw ConfigError("encode: mask of layer " + std::to_string(l) +
                        " does not match its weight count");
    }
    codebooks[l].validate();
  }
}

std::size_t code_bytes(std::size_t survivors, std::uint32_t bits) {
  return (survivors * bits + 7) / 8;
}

}  // namespace

std::string to_string(CodebookKind kind) {
  switch (kind) {
    case CodebookKind::kQuant: return "quant";
    case CodebookKind::kCluster: return "cluster";
    case CodebookKind::kRaw: return "raw";
  }
  return "unknown";
}

Codebook Codebook::quantization(const QuantSpec& spec) {
  const auto bits = static_cast<std::uint32_t>(std::countr_zero(spec.level_count()));
  if ((std::size_t{1} << bits) != spec.level_count()) {
    throw ConfigError("quantization codebook needs a power-of-two level count");
  }
  return {CodebookKind::kQuant, bits, spec.interval(), spec.levels()};
}

Codebook Codebook::clustering(const Tensor& weight, const Mask& mask,
                              std::uint32_t bits) {
  if (bits == 0 || bits > 16) throw ConfigError("cluster codebook bits must lie in [1, 16]");
  std::vector<float> values;
  for (std::size_t j = 0; j < weight.numel(); ++j) {
    if (mask.empty() || mask[j]) values.push_back(weight[j]);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end(),
                           [](float a, float b) { return std::bit_cast<std::uint32_t>(a) ==
                                                         std::bit_cast<std::uint32_t>(b); }),
               values.end());
  if (values.size() > (std::size_t{1} << bits)) {
    throw ExactnessError("layer holds " + std::to_string(values.size()) +
                         " distinct surviving values, more than 2^" +
                         std::to_string(bits));
  }
  return {CodebookKind::kCluster, bits, 0.0f, std::move(values)};
}

Codebook Codebook::raw() { return {CodebookKind::kRaw, 32, 0.0f, {}}; }

long Codebook::index_of(float value) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), value);
  if (it == entries.end() ||
      std::bit_cast<std::uint32_t>(*it) != std::bit_cast<std::uint32_t>(value)) {
    return -1;
  }
  return static_cast<long>(it - entries.begin());
}

std::size_t Codebook::payload_bytes() const {
  switch (kind) {
    case CodebookKind::kQuant: return 4;
    case CodebookKind::kCluster: return 4 * entries.size();
    case CodebookKind::kRaw: return 0;
  }
  return 0;
}

void Codebook::validate() const {
  switch (kind) {
    case CodebookKind::kQuant: {
      if (bits == 0 || bits > 16) throw ConfigError("quant codebook bits must lie in [1, 16]");
      if (!(interval > 0.0f) || entries != QuantSpec(std::size_t{1} << bits, interval).levels()) {
        throw ConfigError("quant codebook entries do not match its interval");
      }
      break;
    }
    case CodebookKind::kCluster:
      if (bits == 0 || bits > 16) throw ConfigError("cluster codebook bits must lie in [1, 16]");
      if (entries.size() > (std::size_t{1} << bits)) {
        throw ConfigError("cluster codebook has more entries than 2^bits");
      }
      for (std::size_t i = 1; i < entries.size(); ++i) {
        if (!(entries[i - 1] < entries[i])) {
          throw ConfigError("cluster codebook entries must be strictly increasing");
        }
      }
      break;
    case CodebookKind::kRaw:
      if (bits != 32 || !entries.empty()) throw ConfigError("raw codebook must be 32-bit and empty");
      break;
  }
}

std::vector<std::uint8_t> encode_index_nibbles(const Mask& mask) {
  std::vector<std::uint8_t> nibbles;
  std::size_t gap = 0;
  for (std::uint8_t keep : mask) {
    if (!keep) {
      ++gap;
      continue;
    }
    for (; gap >= kEscape; gap -= kEscape) nibbles.push_back(kEscape);
    nibbles.push_back(static_cast<std::uint8_t>(gap));
    gap = 0;
  }
  return nibbles;
}

Mask decode_index_nibbles(std::span<const std::uint8_t> nibbles,
                          std::size_t numel, std::size_t survivors) {
  Mask mask(numel, 0);
  std::size_t pos = 0, found = 0;
  for (std::uint8_t n : nibbles) {
    if (n > kEscape) throw FormatError("index stream: nibble out of range");
    pos += n;
    if (n == kEscape) continue;
    if (pos >= numel) {
      throw FormatError("index stream: survivor position " + std::to_string(pos) +
                        " beyond weight count " + std::to_string(numel));
    }
    mask[pos++] = 1;
    ++found;
  }
  if (found != survivors) {
    throw FormatError("index stream: decoded " + std::to_string(found) +
                      " survivors, header says " + std::to_string(survivors));
  }
  return mask;
}

std::vector<std::uint8_t> pack_codes(std::span<const std::uint32_t> codes,
                                     std::uint32_t bits) {
  if (bits == 0 || bits > 32) throw ConfigError("code width must lie in [1, 32]");
  std::vector<std::uint8_t> out(code_bytes(codes.size(), bits), 0);
  std::size_t bit = 0;
  for (std::uint32_t code : codes) {
    for (std::uint32_t b = 0; b < bits; ++b, ++bit) {
      if ((code >> b) & 1u) out[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
    }
  }
  return out;
}

std::vector<std::uint32_t> unpack_codes(std::span<const std::uint8_t> bytes,
                                        std::size_t count, std::uint32_t bits) {
  if (bits == 0 || bits > 32) throw ConfigError("code width must lie in [1, 32]");
  if (bytes.size() < code_bytes(count, bits)) throw FormatError("code block truncated");
  std::vector<std::uint32_t> codes(count, 0);
  std::size_t bit = 0;
  for (auto& code : codes) {
    for (std::uint32_t b = 0; b < bits; ++b, ++bit) {
      if ((bytes[bit / 8] >> (bit % 8)) & 1u) code |= 1u << b;
    }
  }
  return codes;
}

SizeBreakdown measure(const Network& net, const std::vector<Mask>& masks,
                      const std::vector<Codebook>& codebooks) {
  check_layout(net, masks, codebooks);
  SizeBreakdown sizes;
  sizes.header_bytes = 8 + shape_bytes(net.input_shape()) + 4;
  for (const LayerSpec& layer : net.layers()) sizes.header_bytes += layer_header_bytes(layer);
  const ParamList& params = net.params();
  for (std::size_t l = 0; l < params.size(); ++l) {
    LayerSizes s;
    s.numel = params[l].weight.numel();
    s.survivors = count_ones(masks[l]);
    s.bits = codebooks[l].bits;
    s.index_bytes = (encode_index_nibbles(masks[l]).size() + 1) / 2;
    s.codebook_bytes = codebooks[l].payload_bytes();
    s.code_bytes = code_bytes(s.survivors, s.bits);
    s.bias_bytes = 4 * params[l].bias.numel();
    sizes.header_bytes += 4 + 4 + 2 + (codebooks[l].kind == CodebookKind::kCluster ? 4 : 0);
    sizes.total_bytes += s.index_bytes + s.codebook_bytes + s.code_bytes + s.bias_bytes;
    sizes.layers.push_back(s);
  }
  sizes.total_bytes += sizes.header_bytes;
  return sizes;
}

std::vector<std::uint8_t> encode_model(const Network& net,
                                       const std::vector<Mask>& masks,
                                       const std::vector<Codebook>& codebooks) {
  check_layout(net, masks, codebooks);
  wire::Writer out;
  out.bytes(std::string_view(kCompressedMagic, 8));
  wire::write_shape(out, net.input_shape());
  out.u32(static_cast<std::uint32_t>(net.layers().size()));
  for (const LayerSpec& layer : net.layers()) wire::write_layer_header(out, layer);

  const ParamList& params = net.params();
  for (std::size_t l = 0; l < params.size(); ++l) {
    const Tensor& w = params[l].weight;
    const Mask& mask = masks[l];
    const Codebook& book = codebooks[l];
    std::vector<std::uint32_t> codes;
    for (std::size_t j = 0; j < w.numel(); ++j) {
      if (!mask[j]) {
        if (w[j] != 0.0f) {
          throw ExactnessError("layer " + std::to_string(l) + ": pruned weight " +
                               std::to_string(j) + " is nonzero");
        }
        continue;
      }
      if (book.kind == CodebookKind::kRaw) {
        codes.push_back(std::bit_cast<std::uint32_t>(w[j]));
        continue;
      }
      const long index = book.index_of(w[j]);
      if (index < 0) {
        throw ExactnessError("layer " + std::to_string(l) + ": weight " +
                             std::to_string(j) + " = " + std::to_string(w[j]) +
                             " is not in its " + to_string(book.kind) + " codebook");
      }
      codes.push_back(static_cast<std::uint32_t>(index));
    }
    const std::vector<std::uint8_t> nibbles = encode_index_nibbles(mask);
    out.u32(static_cast<std::uint32_t>(codes.size()));
    out.u32(static_cast<std::uint32_t>(nibbles.size()));
    std::vector<std::uint8_t> packed((nibbles.size() + 1) / 2, 0);
    for (std::size_t i = 0; i < nibbles.size(); ++i) {
      packed[i / 2] |= static_cast<std::uint8_t>(nibbles[i] << (4 * (i % 2)));
    }
    out.bytes(packed);
    out.u8(static_cast<std::uint8_t>(book.kind));
    out.u8(static_cast<std::uint8_t>(book.bits));
    if (book.kind == CodebookKind::kQuant) out.f32(book.interval);
    if (book.kind == CodebookKind::kCluster) {
      out.u32(static_cast<std::uint32_t>(book.entries.size()));
      out.f32s(book.entries);
    }
    out.bytes(pack_codes(codes, book.bits));
    out.f32s(params[l].bias.data());
  }
  return out.take();
}

DecodedModel decode_model(std::span<const std::uint8_t> bytes) {
  wire::Reader in(bytes, "compressed model");
  in.expect_magic(std::string_view(kCompressedMagic, 8));
  const Shape input = wire::read_shape(in);
  const std::uint32_t count = in.u32();
  std::vector<LayerSpec> layers;
  for (std::uint32_t k = 0; k < count; ++k) {
    if (in.remaining() == 0) throw FormatError("compressed model: truncated layer table");
    layers.push_back(wire::read_layer_header(in));
  }
  DecodedModel model;
  try {
    model.net = Network(input, std::move(layers));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("compressed model: inconsistent architecture: ") + e.what());
  }
  ParamList& params = model.net.params();
  for (std::size_t l = 0; l < params.size(); ++l) {
    const std::string where = "compressed model: layer " + std::to_string(l);
    Tensor& w = params[l].weight;
    const std::uint32_t survivors = in.u32();
    const std::uint32_t nibble_count = in.u32();
    if (survivors > w.numel()) {
      throw FormatError(where + ": survivor count exceeds weight count");
    }
    const auto packed = in.bytes((static_cast<std::size_t>(nibble_count) + 1) / 2);
    std::vector<std::uint8_t> nibbles(nibble_count);
    for (std::size_t i = 0; i < nibble_count; ++i) {
      nibbles[i] = (packed[i / 2] >> (4 * (i % 2))) & 0x0f;
    }
    Mask mask = decode_index_nibbles(nibbles, w.numel(), survivors);

    Codebook book;
    const std::uint8_t kind = in.u8();
    book.bits = in.u8();
    if (kind > static_cast<std::uint8_t>(CodebookKind::kRaw)) {
      throw FormatError(where + ": unknown codebook kind " + std::to_string(kind));
    }
    book.kind = static_cast<CodebookKind>(kind);
    if (book.kind == CodebookKind::kQuant) {
      if (book.bits == 0 || book.bits > 16) throw FormatError(where + ": bad quant width");
      book.interval = in.f32();
      if (!(book.interval > 0.0f)) throw FormatError(where + ": non-positive interval");
      book.entries = QuantSpec(std::size_t{1} << book.bits, book.interval).levels();
    } else if (book.kind == CodebookKind::kCluster) {
      if (book.bits == 0 || book.bits > 16) throw FormatError(where + ": bad cluster width");
      const std::uint32_t entries = in.u32();
      if (entries > (1u << book.bits)) {
        throw FormatError(where + ": codebook larger than 2^bits");
      }
      book.entries.resize(entries);
      in.f32s(book.entries);
    } else if (book.bits != 32) {
      throw FormatError(where + ": raw codebook must be 32-bit");
    }
    try {
      book.validate();
    } catch (const ConfigError& e) {
      throw FormatError(where + ": " + e.what());
    }

    const auto codes = unpack_codes(in.bytes(code_bytes(survivors, book.bits)),
                                    survivors, book.bits);
    std::size_t next = 0;
    for (std::size_t j = 0; j < w.numel(); ++j) {
      if (!mask[j]) continue;
      const std::uint32_t code = codes[next++];
      if (book.kind == CodebookKind::kRaw) {
        w[j] = std::bit_cast<float>(code);
      } else if (code >= book.entries.size()) {
        throw FormatError(where + ": code " + std::to_string(code) +
                          " out of codebook range " + std::to_string(book.entries.size()));
      } else {
        w[j] = book.entries[code];
      }
    }
    in.f32s(params[l].bias.data());
    model.masks.push_back(std::move(mask));
    model.codebooks.push_back(std::move(book));
  }
  if (in.remaining() != 0) {
    throw FormatError("compressed model: " + std::to_string(in.remaining()) +
                      " trailing bytes");
  }
  return model;
}

void save_compressed(const std::string& path, const Network& net,
                     const std::vector<Mask>& masks,
                     const std::vector<Codebook>& codebooks) {
  wire::write_file(path, encode_model(net, masks, codebooks));
}

DecodedModel load_compressed(const std::string& path) {
  return decode_model(wire::read_file(path));
}

}  // namespace admmc
