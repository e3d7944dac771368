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

#include "yolodesk/augment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <thread>

#include <fmt/format.h>

namespace yolodesk {

namespace {

enum class QuarterTurn { kNone, kCw90, kHalf, kCw270 };

// Clockwise angle in [0, 360).
double normalized_angle(double degrees, bool clockwise) {
  double a = std::fmod(clockwise ? degrees : -degrees, 360.0);
  if (a < 0) a += 360.0;
  if (a >= 360.0) a -= 360.0;
  return a;
}

LabeledImage quarter_turn(const LabeledImage& sample, QuarterTurn turn) {
  const Image& src = sample.image;
  const int w = src.width();
  const int h = src.height();
  LabeledImage out;
  out.source_path = sample.source_path;
  out.image = Image(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Rgb c = src.get(x, y);
      switch (turn) {
        case QuarterTurn::kNone: out.image.set(x, y, c); break;
        case QuarterTurn::kCw90: out.image.set(w - 1 - y, x, c); break;
        case QuarterTurn::kHalf: out.image.set(w - 1 - x, h - 1 - y, c); break;
        case QuarterTurn::kCw270: out.image.set(y, h - 1 - x, c); break;
      }
    }
  }
  for (const YoloLabel& l : sample.labels) {
    const BoxNorm& b = l.box;
    switch (turn) {
      case QuarterTurn::kNone: out.labels.push_back(l); break;
      case QuarterTurn::kCw90: out.labels.push_back({l.class_id, {1.0 - b.cy, b.cx, b.h, b.w}}); break;
      case QuarterTurn::kHalf: out.labels.push_back({l.class_id, {1.0 - b.cx, 1.0 - b.cy, b.w, b.h}}); break;
      case QuarterTurn::kCw270: out.labels.push_back({l.class_id, {b.cy, 1.0 - b.cx, b.h, b.w}}); break;
    }
  }
  return out;
}

}  // namespace

LabeledImage flip(const LabeledImage& sample, FlipAxis axis) {
  const Image& src = sample.image;
  const int w = src.width();
  const int h = src.height();
  LabeledImage out;
  out.source_path = sample.source_path;
  out.image = Image(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (axis == FlipAxis::kHorizontal) {
        out.image.set(w - 1 - x, y, src.get(x, y));
      } else {
        out.image.set(x, h - 1 - y, src.get(x, y));
      }
    }
  }
  for (YoloLabel l : sample.labels) {
    if (axis == FlipAxis::kHorizontal) {
      l.box.cx = 1.0 - l.box.cx;
    } else {
      l.box.cy = 1.0 - l.box.cy;
    }
    out.labels.push_back(l);
  }
  return out;
}

LabeledImage rotate(const LabeledImage& sample, double degrees, bool clockwise,
                    const RotateOptions& options) {
  const double angle = normalized_angle(degrees, clockwise);
  const Image& src = sample.image;
  const int w = src.width();
  const int h = src.height();
  if (angle == 0.0) return quarter_turn(sample, QuarterTurn::kNone);
  if (angle == 180.0) return quarter_turn(sample, QuarterTurn::kHalf);
  if (w == h && angle == 90.0) return quarter_turn(sample, QuarterTurn::kCw90);
  if (w == h && angle == 270.0) return quarter_turn(sample, QuarterTurn::kCw270);

  // With y pointing down, a clockwise turn maps offset (dx, dy) to
  // (c*dx - s*dy, s*dx + c*dy).
  const double rad = angle * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const double ox = w / 2.0;
  const double oy = h / 2.0;

  LabeledImage out;
  out.source_path = sample.source_path;
  out.image = Image(w, h);
  for (int y = 0; y < h; ++y) {
    const double dy = y + 0.5 - oy;
    for (int x = 0; x < w; ++x) {
      const double dx = x + 0.5 - ox;
      const double sx = ox + c * dx + s * dy;
      const double sy = oy - s * dx + c * dy;
      const int px = static_cast<int>(std::floor(sx));
      const int py = static_cast<int>(std::floor(sy));
      if (px >= 0 && px < w && py >= 0 && py < h) out.image.set(x, y, src.get(px, py));
    }
  }

  for (const YoloLabel& l : sample.labels) {
    const BoxCorner b = norm_to_corner(l.box, w, h);
    const double xs[4] = {b.x_min, b.x_max, b.x_max, b.x_min};
    const double ys[4] = {b.y_min, b.y_min, b.y_max, b.y_max};
    BoxCorner r{INFINITY, INFINITY, -INFINITY, -INFINITY};
    for (int k = 0; k < 4; ++k) {
      const double dx = xs[k] - ox;
      const double dy = ys[k] - oy;
      const double rx = ox + c * dx - s * dy;
      const double ry = oy + s * dx + c * dy;
      r = {std::min(r.x_min, rx), std::min(r.y_min, ry), std::max(r.x_max, rx), std::max(r.y_max, ry)};
    }
    const BoxCorner clipped = clamp_box(r, w, h);
    if (!(clipped.area() > 0) || clipped.area() < options.min_visible_fraction * r.area()) continue;
    const BoxNorm norm = corner_to_norm(clipped, w, h);
    if (norm.valid()) out.labels.push_back({l.class_id, norm});
  }
  return out;
}

std::string variant_name(const std::string& stem, double degrees, const FlipAxis* axis) {
  const char tag = axis == nullptr ? 'n' : (*axis == FlipAxis::kHorizontal ? 'h' : 'v');
  return fmt::format("{}_r{}_f{}", stem, degrees, tag);
}

ExpansionResult expand_dataset(std::span<const LabeledImage> samples, const ExpansionPlan& plan,
                               int num_classes) {
  const std::vector<double> rotations = plan.rotations.empty() ? std::vector<double>{0.0} : plan.rotations;
  ExpansionResult result;
  result.images_per_class.assign(static_cast<std::size_t>(std::max(num_classes, 0)), 0);

  const auto record = [&](LabeledImage img) {
    std::vector<bool> present(result.images_per_class.size(), false);
    for (const YoloLabel& l : img.labels) {
      if (l.class_id >= 0 && l.class_id < num_classes) present[l.class_id] = true;
    }
    for (std::size_t c = 0; c < present.size(); ++c) result.images_per_class[c] += present[c];
    result.images.push_back(std::move(img));
  };

  const auto expand_one = [&](const LabeledImage& sample) {
    const std::string stem = std::filesystem::path(sample.source_path).stem().string();
    std::vector<LabeledImage> out;
    for (double degrees : rotations) {
      LabeledImage turned = rotate(sample, degrees, plan.clockwise, plan.rotate);
      turned.source_path = variant_name(stem, degrees, nullptr);
      out.push_back(std::move(turned));
      const LabeledImage& base = out[out.size() - 1];
      std::vector<LabeledImage> flipped;
      for (const FlipAxis& axis : plan.flips) {
        flipped.push_back(flip(base, axis));
        flipped.back().source_path = variant_name(stem, degrees, &axis);
      }
      for (LabeledImage& f : flipped) out.push_back(std::move(f));
    }
    return out;
  };

  // Samples are expanded concurrently; output order follows the input order.
  std::vector<std::vector<LabeledImage>> per_sample(samples.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < samples.size(); i = next++) per_sample[i] = expand_one(samples[i]);
  };
  const std::size_t threads =
      std::min<std::size_t>(samples.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (auto& images : per_sample) {
    for (LabeledImage& img : images) record(std::move(img));
  }
  for (int c = 0; c < num_classes; ++c) {
    if (result.images_per_class[c] < plan.class_floor) result.below_floor.push_back(c);
  }
  return result;
}

}  // namespace yolodesk
