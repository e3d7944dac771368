// Copyright 2026 The yolodesk Authors. All Rights Reserved.
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

#include "yolodesk/head_io.h"

#include <bit>
#include <cmath>
#include <cstring>

#include <fmt/format.h>

#include "yolodesk/error.h"

namespace yolodesk {

namespace {

constexpr char kMagic[4] = {'Y', 'F', '0', '1'};
constexpr std::size_t kHeaderSize = 12;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes[offset + i]} << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> write_head(const Tensor& head) {
  if (head.height() != head.width()) {
    throw ShapeError(fmt::format("head tensor must be square, got {}x{}", head.height(), head.width()));
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + head.size() * 4);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(head.height()));
  put_u32(out, static_cast<std::uint32_t>(head.channels()));
  for (double v : head.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

Tensor read_head(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not a YF01 head tensor");
  }
  const std::uint32_t grid = get_u32(bytes, 4);
  const std::uint32_t channels = get_u32(bytes, 8);
  if (grid == 0 || channels == 0 || grid > 4096 || channels > 65536) {
    throw FormatError(fmt::format("implausible head dimensions {}x{}x{}", grid, grid, channels));
  }
  const std::size_t count = std::size_t{grid} * grid * channels;
  if (bytes.size() != kHeaderSize + count * 4) {
    throw FormatError(fmt::format("head payload is {} bytes, expected {}", bytes.size() - kHeaderSize,
                                  count * 4));
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const float f = std::bit_cast<float>(get_u32(bytes, kHeaderSize + 4 * i));
    if (!std::isfinite(f)) throw FormatError(fmt::format("non-finite value at index {}", i));
    values[i] = f;
  }
  return Tensor(static_cast<int>(grid), static_cast<int>(grid), static_cast<int>(channels),
                std::move(values));
}

}  // namespace yolodesk
