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

// Little-endian byte stream helpers shared by the checkpoint and the
// compressed-model codec. Internal to the library.

#ifndef ADMMC_SRC_WIRE_HPP_
#define ADMMC_SRC_WIRE_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "admmc/error.hpp"
#include "admmc/network.hpp"

namespace admmc::wire {

class Writer {
 public:
  void bytes(std::string_view raw) {
    buffer_.insert(buffer_.end(), raw.begin(), raw.end());
  }
  void bytes(std::span<const std::uint8_t> raw) {
    buffer_.insert(buffer_.end(), raw.begin(), raw.end());
  }
  void u8(std::uint8_t v) { buffer_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buffer_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f32s(std::span<const float> values) {
    for (float v : values) f32(v);
  }
  std::size_t size() const noexcept { return buffer_.size(); }
  std::vector<std::uint8_t> take() { return std::move(buffer_); }

 private:
  std::vector<std::uint8_t> buffer_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> data, std::string context)
      : data_(data), context_(std::move(context)) {}

  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint8_t u8() { return bytes(1)[0]; }
  std::uint32_t u32() {
    auto b = bytes(4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }
  float f32() { return std::bit_cast<float>(u32()); }
  void f32s(std::span<float> out) {
    need(out.size() * 4);
    for (float& v : out) v = f32();
  }
  void expect_magic(std::string_view magic) {
    if (remaining() < magic.size() ||
        std::memcmp(data_.data() + pos_, magic.data(), magic.size()) != 0) {
      throw FormatError(context_ + ": bad magic, expected \"" +
                        std::string(magic) + "\"");
    }
    pos_ += magic.size();
  }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }
  const std::string& context() const noexcept { return context_; }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) {
      throw FormatError(context_ + ": truncated stream (needed " +
                        std::to_string(n) + " bytes at offset " +
                        std::to_string(pos_) + ", " +
                        std::to_string(remaining()) + " left)");
    }
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::string context_;
};

// Architecture header: input shape then, per layer, kind tag, dims, stride.
// Returns nothing for the parameters; callers append those.
void write_shape(Writer& out, const Shape& shape);
Shape read_shape(Reader& in, std::size_t max_rank = 8);

void write_layer_header(Writer& out, const LayerSpec& layer);
LayerSpec read_layer_header(Reader& in);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> data);

}  // namespace admmc::wire

#endif  // ADMMC_SRC_WIRE_HPP_
