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

#ifndef YOLODESK_AUGMENT_H_
#define YOLODESK_AUGMENT_H_

#include <span>
#include <string>
#include <vector>

#include "yolodesk/labels.h"

namespace yolodesk {

enum class FlipAxis { kHorizontal, kVertical };

// Horizontal mirrors left-right (cx -> 1 - cx), vertical mirrors top-bottom
// (cy -> 1 - cy). Exact: applying the same flip twice restores the sample
// bit for bit when its labels sit on the label lattice.
LabeledImage flip(const LabeledImage& sample, FlipAxis axis);

struct RotateOptions {
  // Labels keeping less than this fraction of their rotated area after
  // clipping to the canvas are dropped.
  double min_visible_fraction = 0.2;
};

// Rotates about the image center onto a same-size canvas with nearest
// neighbour sampling; uncovered pixels are black. Each label becomes the
// axis-aligned box around its four rotated corners, clipped to the canvas.
// Multiples of 180 degrees, and of 90 degrees on square images, take an exact
// pixel permutation path.
LabeledImage rotate(const LabeledImage& sample, double degrees, bool clockwise = true,
                    const RotateOptions& options = {});

struct ExpansionPlan {
  std::vector<double> rotations;  // degrees; empty means no rotation
  std::vector<FlipAxis> flips;    // each adds one flip state beside identity
  bool clockwise = true;
  int class_floor = 300;
  RotateOptions rotate;
};

struct ExpansionResult {
  std::vector<LabeledImage> images;
  std::vector<int> images_per_class;  // images containing the class at least once
  std::vector<int> below_floor;       // class ids under ExpansionPlan::class_floor
};

// Every sample x rotation x {identity, flips...}, named
// `<stem>_r<degrees>_f<n|h|v>`, in that nesting order.
ExpansionResult expand_dataset(std::span<const LabeledImage> samples, const ExpansionPlan& plan,
                               int num_classes);

std::string variant_name(const std::string& stem, double degrees, const FlipAxis* axis);

}  // namespace yolodesk

#endif  // YOLODESK_AUGMENT_H_
