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

#include "admmc/checkpoint.hpp"

#include <fstream>
#include <iterator>

#include "admmc/error.hpp"
#include "wire.hpp"

namespace admmc {
namespace wire {

void write_shape(Writer& out, const Shape& shape) {
  out.u32(static_cast<std::uint32_t>(shape.size()));
  for (std::size_t d : shape) out.u32(static_cast<std::uint32_t>(d));
}

Shape read_shape(Reader& in, std::size_t max_rank) {
  const std::uint32_t rank = in.u32();
  if (rank > max_rank) {
    throw FormatError(in.context() + ": implausible rank " + std::to_string(rank));
  }
  Shape shape(rank);
  for (auto& d : shape) d = in.u32();
  return shape;
}

void write_layer_header(Writer& out, const LayerSpec& layer) {
  out.u8(static_cast<std::uint8_t>(layer.kind));
  switch (layer.kind) {
    case LayerKind::kDense:
    case LayerKind::kConv2d:
      write_shape(out, layer.weight_shape());
      break;
    case LayerKind::kMaxPool:
      write_shape(out, {layer.kernel, layer.kernel});
      break;
    case LayerKind::kRelu:
    case LayerKind::kFlatten:
      write_shape(out, {});
      break;
  }
  out.u32(static_cast<std::uint32_t>(layer.stride));
}

LayerSpec read_layer_header(Reader& in) {
  const std::uint8_t tag = in.u8();
  const Shape dims = read_shape(in);
  const std::uint32_t stride = in.u32();
  auto require_rank = [&](std::size_t rank) {
    if (dims.size() != rank) {
      throw FormatError(in.context() + ": layer tag " + std::to_string(tag) +
                        " carries rank-" + std::to_string(dims.size()) +
                        " dims, expected " + std::to_string(rank));
    }
  };
  switch (static_cast<LayerKind>(tag)) {
    case LayerKind::kDense:
      require_rank(2);
      return LayerSpec::dense(dims[1], dims[0]);
    case LayerKind::kConv2d:
      require_rank(4);
      if (dims[2] != dims[3]) {
        throw FormatError(in.context() + ": non-square conv filters");
      }
      return LayerSpec::conv2d(dims[1], dims[0], dims[2], stride);
    case LayerKind::kMaxPool:
      require_rank(2);
      return LayerSpec::maxpool(dims[0], stride);
    case LayerKind::kRelu:
      require_rank(0);
      return LayerSpec::relu();
    case LayerKind::kFlatten:
      require_rank(0);
      return LayerSpec::flatten();
  }
  throw FormatError(in.context() + ": unknown layer kind tag " + std::to_string(tag));
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("short write to " + path);
}

}  // namespace wire

std::vector<std::uint8_t> serialize_network(const Network& net) {
  wire::Writer out;
  out.bytes(std::string_view(kCheckpointMagic, 8));
  wire::write_shape(out, net.input_shape());
  out.u32(static_cast<std::uint32_t>(net.layers().size()));
  std::size_t slot = 0;
  for (const LayerSpec& layer : net.layers()) {
    wire::write_layer_header(out, layer);
    if (layer.trainable()) {
      const LayerParams& p = net.params()[slot++];
      out.f32s(p.weight.data());
      out.f32s(p.bias.data());
    }
  }
  return out.take();
}

Network deserialize_network(std::span<const std::uint8_t> bytes) {
  wire::Reader in(bytes, "checkpoint");
  in.expect_magic(std::string_view(kCheckpointMagic, 8));
  const Shape input = wire::read_shape(in);
  const std::uint32_t count = in.u32();
  std::vector<LayerSpec> layers;
  std::vector<std::pair<std::vector<float>, std::vector<float>>> values;
  for (std::uint32_t k = 0; k < count; ++k) {
    LayerSpec layer = wire::read_layer_header(in);
    if (layer.trainable()) {
      const std::size_t numel = shape_numel(layer.weight_shape());
      if ((numel + layer.out) > in.remaining() / 4) {
        throw FormatError("checkpoint: truncated parameters for layer " +
                          std::to_string(k));
      }
      std::vector<float> w(numel), b(layer.out);
      in.f32s(w);
      in.f32s(b);
      values.emplace_back(std::move(w), std::move(b));
    }
    layers.push_back(layer);
  }
  if (in.remaining() != 0) {
    throw FormatError("checkpoint: " + std::to_string(in.remaining()) +
                      " trailing bytes");
  }
  Network net;
  try {
    net = Network(input, std::move(layers));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint: inconsistent architecture: ") + e.what());
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    LayerParams& p = net.params()[i];
    p.weight = Tensor(p.weight.shape(), std::move(values[i].first));
    p.bias = Tensor(p.bias.shape(), std::move(values[i].second));
  }
  return net;
}

void save_checkpoint(const Network& net, const std::string& path) {
  wire::write_file(path, serialize_network(net));
}

Network load_checkpoint(const std::string& path) {
  return deserialize_network(wire::read_file(path));
}

}  // namespace admmc
