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

#ifndef YOLODESK_GEOMETRY_H_
#define YOLODESK_GEOMETRY_H_

#include <vector>

namespace yolodesk {

// Pixel-space corners, origin top-left, y pointing down.
struct BoxCorner {
  double x_min = 0;
  double y_min = 0;
  double x_max = 0;
  double y_max = 0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool valid() const { return x_min <= x_max && y_min <= y_max; }
  friend bool operator==(const BoxCorner&, const BoxCorner&) = default;
};

// Center format, every field a fraction of the image extent.
struct BoxNorm {
  double cx = 0;
  double cy = 0;
  double w = 0;
  double h = 0;

  bool valid() const {
    return cx >= 0 && cx <= 1 && cy >= 0 && cy <= 1 && w > 0 && w <= 1 && h > 0 && h <= 1;
  }
  friend bool operator==(const BoxNorm&, const BoxNorm&) = default;
};

// Normalized coordinates are kept on a 2^-40 lattice. On that lattice 1 - x
// is exact for every x in [0, 1], so flips and quarter turns of labels are
// exact involutions. The rounding step is below 1e-12.
double snap_unit(double x);
BoxNorm snapped(const BoxNorm& box);

struct Anchor {
  double p_w = 0;
  double p_h = 0;
};

struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// One anchor slot of one grid cell before any activation. The decode
// context (anchor, grid and input size) travels with the prediction.
struct RawPrediction {
  double t_x = 0;
  double t_y = 0;
  double t_w = 0;
  double t_h = 0;
  double objectness_logit = 0;
  std::vector<double> class_logits;
  Cell cell;
  int scale_index = 0;
  int anchor_slot = 0;
  Anchor anchor;
  int grid_n = 1;
  int input_n = 1;
};

double sigmoid(double x);

// Decoded box in center form at network-input pixel scale, before clamping.
struct CenterBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;
};

CenterBox decode_center(const RawPrediction& raw, const Anchor& anchor, int grid_n, int input_n);

// Anchor-offset decode: center = (sigmoid(t) + cell) * stride, size =
// prior * exp(t). The result is clamped to [0, input_n].
BoxCorner decode_box(const RawPrediction& raw, const Anchor& anchor, int grid_n, int input_n);
BoxCorner decode_box(const RawPrediction& raw);

BoxCorner clamp_box(const BoxCorner& box, double width, double height);

// Zero when the union has no area.
double iou(const BoxCorner& a, const BoxCorner& b);
double iou(const BoxNorm& a, const BoxNorm& b);

BoxNorm corner_to_norm(const BoxCorner& box, double img_w, double img_h);
BoxCorner norm_to_corner(const BoxNorm& box, double img_w, double img_h);

Cell responsible_cell(const BoxNorm& gt, int grid_n);

}  // namespace yolodesk

#endif  // YOLODESK_GEOMETRY_H_
