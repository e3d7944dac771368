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

#ifndef YOLODESK_HEAD_IO_H_
#define YOLODESK_HEAD_IO_H_

#include <cstdint>
#include <span>
#include <vector>

#include "yolodesk/tensor.h"

namespace yolodesk {

// Little-endian raw head tensor: the 4-byte magic "YF01", grid_n and channels
// as uint32, then grid_n * grid_n * channels float32 values in (row, column,
// channel) order.
std::vector<std::uint8_t> write_head(const Tensor& head);
Tensor read_head(std::span<const std::uint8_t> bytes);

}  // namespace yolodesk

#endif  // YOLODESK_HEAD_IO_H_
