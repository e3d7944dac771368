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

#include "yolodesk/synth.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "yolodesk/error.h"

namespace yolodesk {

namespace {

constexpr Rgb kPalette[] = {
    {230, 25, 75},  {60, 180, 75},   {255, 225, 25}, {0, 130, 200},  {245, 130, 48},
    {145, 30, 180}, {70, 240, 240},  {240, 50, 230}, {210, 245, 60}, {250, 190, 212},
    {0, 128, 128},  {220, 190, 255}, {170, 110, 40},
};
constexpr int kShapeKinds = 7;

// Separation along the axis where the boxes are furthest apart; negative
// when they overlap on both axes.
int separation(const SceneObject& a, const SceneObject& b) {
  const int gx = std::max(a.x0 - b.x1, b.x0 - a.x1);
  const int gy = std::max(a.y0 - b.y1, b.y0 - a.y1);
  return std::max(gx, gy);
}

void paint(Image& image, const SceneObject& o, Rgb color) {
  const ShapeKind shape = class_style(o.class_id).shape;
  const double w = o.x1 - o.x0;
  const double h = o.y1 - o.y0;
  // A pixel is painted when its point nearest the shape centre or one of its
  // corners lies in the shape, so every shape reaches all four box edges.
  for (int y = std::max(o.y0, 0); y < std::min(o.y1, image.height()); ++y) {
    const double v0 = (y - o.y0) / h, v1 = (y - o.y0 + 1) / h;
    const double v = std::clamp(0.5, v0, v1);
    for (int x = std::max(o.x0, 0); x < std::min(o.x1, image.width()); ++x) {
      const double u0 = (x - o.x0) / w, u1 = (x - o.x0 + 1) / w;
      const double u = std::clamp(0.5, u0, u1);
      if (shape_contains(shape, u, v) || shape_contains(shape, u0, v0) || shape_contains(shape, u1, v0) ||
          shape_contains(shape, u0, v1) || shape_contains(shape, u1, v1)) {
        image.set(x, y, color);
      }
    }
  }
}

}  // namespace

ClassStyle class_style(int class_id) {
  const int n = static_cast<int>(std::size(kPalette));
  const int i = ((class_id % n) + n) % n;
  return {static_cast<ShapeKind>(i % kShapeKinds), kPalette[i]};
}

bool shape_contains(ShapeKind shape, double u, double v) {
  const double a = 2 * u - 1;
  const double b = 2 * v - 1;
  switch (shape) {
    case ShapeKind::kRectangle: return true;
    case ShapeKind::kEllipse: return a * a + b * b <= 1.0;
    case ShapeKind::kDiamond: return std::abs(a) + std::abs(b) <= 1.0;
    case ShapeKind::kTriangle: return v >= std::abs(a);
    case ShapeKind::kCross: return std::abs(a) <= 1.0 / 3 || std::abs(b) <= 1.0 / 3;
    case ShapeKind::kRing: {
      const double r2 = a * a + b * b;
      return r2 <= 1.0 && r2 >= 0.25;
    }
    case ShapeKind::kFrame: return std::abs(a) >= 0.6 || std::abs(b) >= 0.6;
  }
  return false;
}

Image render_object_mask(const SceneObject& object, int width, int height) {
  Image mask(width, height);
  paint(mask, object, {255, 255, 255});
  return mask;
}

Scene generate_synthetic_scene(std::uint64_t seed, const ClassRegistry& registry,
                               const SceneSpec& spec) {
  if (registry.size() == 0) throw RangeError(0, "synthetic scenes need at least one class");
  if (spec.count_min < 0 || spec.count_max < spec.count_min || spec.size_min <= 0 ||
      spec.size_max < spec.size_min || spec.size_max > spec.canvas) {
    throw RangeError(0, "inconsistent scene specification");
  }
  std::mt19937_64 rng(seed);
  const auto uniform = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  const int count = std::max(uniform(spec.count_min, spec.count_max),
                             static_cast<int>(spec.required_classes.size()));
  std::vector<int> classes = spec.required_classes;
  while (static_cast<int>(classes.size()) < count) {
    if (spec.class_pool.empty()) {
      classes.push_back(uniform(0, registry.size() - 1));
    } else {
      classes.push_back(spec.class_pool[uniform(0, static_cast<int>(spec.class_pool.size()) - 1)]);
    }
  }

  Scene scene;
  for (int cls : classes) {
    if (cls < 0 || cls >= registry.size()) {
      throw RangeError(0, fmt::format("class id {} outside the registry", cls));
    }
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_attempts && !placed; ++attempt) {
      SceneObject o;
      o.class_id = cls;
      const int w = uniform(spec.size_min, spec.size_max);
      const int h = uniform(spec.size_min, spec.size_max);
      o.x0 = uniform(0, spec.canvas - w);
      o.y0 = uniform(0, spec.canvas - h);
      o.x1 = o.x0 + w;
      o.y1 = o.y0 + h;
      placed = std::all_of(scene.objects.begin(), scene.objects.end(),
                           [&](const SceneObject& other) { return separation(o, other) >= spec.min_gap; });
      if (placed) scene.objects.push_back(o);
    }
    if (!placed) {
      throw RangeError(0, fmt::format("could not place object {} of {} after {} attempts",
                                      scene.objects.size() + 1, classes.size(), spec.max_attempts));
    }
  }

  scene.sample.image = Image(spec.canvas, spec.canvas, kSceneBackground);
  for (const SceneObject& o : scene.objects) {
    paint(scene.sample.image, o, class_style(o.class_id).color);
    scene.sample.labels.push_back({o.class_id, corner_to_norm(o.box(), spec.canvas, spec.canvas)});
  }
  return scene;
}

Scenario parse_scenario(std::string_view tag) {
  if (tag == "1" || tag == "single-class") return Scenario::kSingleClass;
  if (tag == "2" || tag == "multi-class-group") return Scenario::kMultiClassGroup;
  if (tag == "3" || tag == "all-classes") return Scenario::kAllClasses;
  throw RangeError(0, fmt::format("unknown scenario '{}'", tag));
}

std::string_view scenario_tag(Scenario scenario) {
  switch (scenario) {
    case Scenario::kSingleClass: return "single-class";
    case Scenario::kMultiClassGroup: return "multi-class-group";
    case Scenario::kAllClasses: return "all-classes";
  }
  return "single-class";
}

SceneSpec scenario_spec(Scenario scenario, int image_index, int num_classes) {
  SceneSpec spec;
  switch (scenario) {
    case Scenario::kSingleClass:
      // One part per image, classes visited in turn.
      spec.count_min = spec.count_max = 1;
      spec.size_min = 60;
      spec.size_max = 180;
      spec.required_classes = {image_index % num_classes};
      break;
    case Scenario::kMultiClassGroup:
      // Small groups that may nearly touch.
      spec.count_min = 2;
      spec.count_max = 6;
      spec.min_gap = -3;
      spec.size_min = 50;
      spec.size_max = 130;
      break;
    case Scenario::kAllClasses:
      // Every class once plus a few repeats, packed more tightly.
      spec.count_min = num_classes;
      spec.count_max = num_classes + 3;
      spec.min_gap = -2;
      spec.size_min = 40;
      spec.size_max = 90;
      for (int c = 0; c < num_classes; ++c) spec.required_classes.push_back(c);
      break;
  }
  return spec;
}

std::vector<Scene> generate_scenario(Scenario scenario, std::uint64_t seed, int count,
                                     const ClassRegistry& registry) {
  std::vector<Scene> scenes;
  for (int i = 0; i < count; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(scenario), static_cast<std::uint32_t>(i)};
    std::uint32_t words[2];
    seq.generate(std::begin(words), std::end(words));
    const std::uint64_t scene_seed = (std::uint64_t{words[0]} << 32) | words[1];
    Scene scene = generate_synthetic_scene(scene_seed, registry,
                                           scenario_spec(scenario, i, registry.size()));
    scene.sample.source_path = fmt::format("s{}_{:03}", static_cast<int>(scenario), i);
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

}  // namespace yolodesk
