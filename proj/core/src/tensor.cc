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

#include "yolodesk/tensor.h"

#include <string>
#include <utility>

#include "yolodesk/error.h"

namespace yolodesk {

namespace {

void check_dims(int height, int width, int channels) {
  if (height <= 0 || width <= 0 || channels < 0) {
    throw ShapeError("tensor dimensions must be positive, got " + std::to_string(height) + "x" +
                     std::to_string(width) + "x" + std::to_string(channels));
  }
}

}  // namespace

Tensor::Tensor(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width, channels);
  values_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

Tensor::Tensor(int height, int width, int channels, std::vector<double> values)
    : height_(height), width_(width), channels_(channels), values_(std::move(values)) {
  check_dims(height, width, channels);
  const std::size_t expected = static_cast<std::size_t>(height) * width * channels;
  if (values_.size() != expected) {
    throw ShapeError("tensor value count " + std::to_string(values_.size()) + " does not match " +
                     std::to_string(height) + "x" + std::to_string(width) + "x" +
                     std::to_string(channels) + " = " + std::to_string(expected));
  }
}

}  // namespace yolodesk
