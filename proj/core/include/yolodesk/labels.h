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

#ifndef YOLODESK_LABELS_H_
#define YOLODESK_LABELS_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "yolodesk/geometry.h"
#include "yolodesk/image.h"

namespace yolodesk {

// Ordered class names; a name's position is its class id.
class ClassRegistry {
 public:
  ClassRegistry() = default;
  // Names must be non-empty, unique and free of whitespace.
  explicit ClassRegistry(std::vector<std::string> names);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
  std::span<const std::string> names() const { return names_; }
  // -1 when absent.
  int find(std::string_view name) const;

 private:
  std::vector<std::string> names_;
};

// `classes.txt`: one name per line, trailing blank lines ignored.
ClassRegistry parse_classes(std::string_view text);
std::string format_classes(const ClassRegistry& registry);

// The thirteen part classes used by the synthetic scenarios.
ClassRegistry default_part_registry();

struct YoloLabel {
  int class_id = 0;
  BoxNorm box;
  friend bool operator==(const YoloLabel&, const YoloLabel&) = default;
};

struct LabeledImage {
  Image image;
  std::vector<YoloLabel> labels;
  std::string source_path;
  friend bool operator==(const LabeledImage&, const LabeledImage&) = default;
};

// `class_id cx cy w h` per line. Parsed coordinates land on the label lattice
// (see snap_unit). Errors carry the 1-based line number.
std::vector<YoloLabel> read_yolo_labels(std::string_view text, const ClassRegistry& registry);
// Six decimals per coordinate, LF line endings.
std::string write_yolo_labels(std::span<const YoloLabel> labels);

struct CornerLabel {
  std::string class_name;
  BoxCorner box;
};

// `class_name x_min y_min x_max y_max` in pixels. Corners may exceed the
// image by up to one pixel; they are clamped when converted.
std::vector<CornerLabel> read_labelimg_corners(std::string_view text, int img_w, int img_h);
std::vector<YoloLabel> corners_to_yolo(std::span<const CornerLabel> corners, int img_w, int img_h,
                                       const ClassRegistry& registry);

struct CsvRow {
  std::string filename;
  int width = 0;
  int height = 0;
  std::string class_name;
  BoxCorner box;
  friend bool operator==(const CsvRow&, const CsvRow&) = default;
};

// One row per box in pixel corners, ordered by (filename, label index).
std::vector<CsvRow> csv_rows(std::span<const LabeledImage> dataset, const ClassRegistry& registry);
// Header `filename,width,height,class,x_min,y_min,x_max,y_max`; reals use the
// shortest text that reads back to the same double.
std::string format_csv(std::span<const CsvRow> rows);
std::string aggregate_csv(std::span<const LabeledImage> dataset, const ClassRegistry& registry);
std::vector<CsvRow> parse_csv(std::string_view text);

}  // namespace yolodesk

#endif  // YOLODESK_LABELS_H_
