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

#include "yolodesk/geometry.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "yolodesk/error.h"

namespace yolodesk {

double snap_unit(double x) {
  constexpr int kBits = 40;
  return std::ldexp(std::nearbyint(std::ldexp(x, kBits)), -kBits);
}

BoxNorm snapped(const BoxNorm& box) {
  return {snap_unit(box.cx), snap_unit(box.cy), snap_unit(box.w), snap_unit(box.h)};
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

CenterBox decode_center(const RawPrediction& raw, const Anchor& anchor, int grid_n, int input_n) {
  if (grid_n <= 0 || input_n <= 0) {
    throw ShapeError(fmt::format("decode: grid {} and input {} must be positive", grid_n, input_n));
  }
  if (raw.cell.row < 0 || raw.cell.col < 0 || raw.cell.row >= grid_n || raw.cell.col >= grid_n) {
    throw ShapeError(fmt::format("decode: cell ({}, {}) outside {}x{} grid", raw.cell.row,
                                 raw.cell.col, grid_n, grid_n));
  }
  const double stride = static_cast<double>(input_n) / grid_n;
  return {(sigmoid(raw.t_x) + raw.cell.col) * stride, (sigmoid(raw.t_y) + raw.cell.row) * stride,
          anchor.p_w * std::exp(raw.t_w), anchor.p_h * std::exp(raw.t_h)};
}

BoxCorner clamp_box(const BoxCorner& box, double width, double height) {
  return {std::clamp(box.x_min, 0.0, width), std::clamp(box.y_min, 0.0, height),
          std::clamp(box.x_max, 0.0, width), std::clamp(box.y_max, 0.0, height)};
}

BoxCorner decode_box(const RawPrediction& raw, const Anchor& anchor, int grid_n, int input_n) {
  const CenterBox c = decode_center(raw, anchor, grid_n, input_n);
  const BoxCorner box{c.x - c.w / 2, c.y - c.h / 2, c.x + c.w / 2, c.y + c.h / 2};
  return clamp_box(box, input_n, input_n);
}

BoxCorner decode_box(const RawPrediction& raw) {
  return decode_box(raw, raw.anchor, raw.grid_n, raw.input_n);
}

double iou(const BoxCorner& a, const BoxCorner& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou(const BoxNorm& a, const BoxNorm& b) {
  return iou(norm_to_corner(a, 1.0, 1.0), norm_to_corner(b, 1.0, 1.0));
}

BoxNorm corner_to_norm(const BoxCorner& box, double img_w, double img_h) {
  if (!(img_w > 0) || !(img_h > 0)) {
    throw RangeError(0, fmt::format("image dimensions must be positive, got {}x{}", img_w, img_h));
  }
  const BoxCorner c = clamp_box(box, img_w, img_h);
  return snapped({(c.x_min + c.x_max) / 2 / img_w, (c.y_min + c.y_max) / 2 / img_h,
                  (c.x_max - c.x_min) / img_w, (c.y_max - c.y_min) / img_h});
}

BoxCorner norm_to_corner(const BoxNorm& box, double img_w, double img_h) {
  if (!(img_w > 0) || !(img_h > 0)) {
    throw RangeError(0, fmt::format("image dimensions must be positive, got {}x{}", img_w, img_h));
  }
  return {(box.cx - box.w / 2) * img_w, (box.cy - box.h / 2) * img_h, (box.cx + box.w / 2) * img_w,
          (box.cy + box.h / 2) * img_h};
}

Cell responsible_cell(const BoxNorm& gt, int grid_n) {
  const auto index = [grid_n](double v) {
    const int i = static_cast<int>(std::floor(v * grid_n));
    return std::clamp(i, 0, grid_n - 1);
  };
  return {index(gt.cy), index(gt.cx)};
}

}  // namespace yolodesk
