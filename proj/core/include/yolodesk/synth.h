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

#ifndef YOLODESK_SYNTH_H_
#define YOLODESK_SYNTH_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "yolodesk/labels.h"

namespace yolodesk {

enum class ShapeKind { kRectangle, kEllipse, kDiamond, kTriangle, kCross, kRing, kFrame };

struct ClassStyle {
  ShapeKind shape;
  Rgb color;
};

// Shape and colour of class `class_id`; colours are distinct across the
// thirteen default classes.
ClassStyle class_style(int class_id);

// Whether the point (u, v) of the unit square belongs to the shape.
bool shape_contains(ShapeKind shape, double u, double v);

struct SceneObject {
  int class_id = 0;
  // Integer pixel bounds, half-open: columns [x0, x1), rows [y0, y1).
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  BoxCorner box() const { return {double(x0), double(y0), double(x1), double(y1)}; }
};

struct SceneSpec {
  int canvas = 608;
  int count_min = 1;
  int count_max = 1;
  // Smallest allowed separation between two objects along the axis where they
  // are furthest apart. Negative values allow overlap of that many pixels.
  int min_gap = 0;
  int size_min = 40;
  int size_max = 120;
  // Classes placed first, in order, before the random fill up to the count.
  std::vector<int> required_classes;
  // Classes the random fill draws from; empty means the whole registry.
  std::vector<int> class_pool;
  int max_attempts = 2000;
};

struct Scene {
  LabeledImage sample;
  std::vector<SceneObject> objects;
};

inline constexpr Rgb kSceneBackground{48, 48, 48};

// Renders `count` parametric parts on a plain background. Deterministic for a
// given seed. Throws RangeError when an object cannot be placed.
Scene generate_synthetic_scene(std::uint64_t seed, const ClassRegistry& registry,
                               const SceneSpec& spec);

// White-on-black raster of one object alone.
Image render_object_mask(const SceneObject& object, int width, int height);

enum class Scenario { kSingleClass = 1, kMultiClassGroup = 2, kAllClasses = 3 };

// Accepts "1"/"2"/"3" or "single-class"/"multi-class-group"/"all-classes".
Scenario parse_scenario(std::string_view tag);
std::string_view scenario_tag(Scenario scenario);
SceneSpec scenario_spec(Scenario scenario, int image_index, int num_classes);

// `count` scenes named s<scenario>_<index, three digits>.
std::vector<Scene> generate_scenario(Scenario scenario, std::uint64_t seed, int count,
                                     const ClassRegistry& registry);

}  // namespace yolodesk

#endif  // YOLODESK_SYNTH_H_
