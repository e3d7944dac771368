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

#ifndef YOLODESK_TENSOR_H_
#define YOLODESK_TENSOR_H_

#include <cstddef>
#include <span>
#include <vector>

namespace yolodesk {

// Dense height x width x channels feature map stored row-major in
// (row, column, channel) order. A tensor may have zero channels, which makes
// it the neutral element of channel concatenation.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int height, int width, int channels, double fill = 0.0);
  Tensor(int height, int width, int channels, std::vector<double> values);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return values_.size(); }

  double& at(int row, int col, int ch) { return values_[index(row, col, ch)]; }
  double at(int row, int col, int ch) const { return values_[index(row, col, ch)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  // Channel vector of one spatial position.
  std::span<const double> pixel(int row, int col) const {
    return {values_.data() + index(row, col, 0), static_cast<std::size_t>(channels_)};
  }

  bool same_shape(const Tensor& other) const {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t index(int row, int col, int ch) const {
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> values_;
};

}  // namespace yolodesk

#endif  // YOLODESK_TENSOR_H_
