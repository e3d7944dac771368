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

#ifndef YOLODESK_POSTPROCESS_H_
#define YOLODESK_POSTPROCESS_H_

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "yolodesk/geometry.h"
#include "yolodesk/tensor.h"

namespace yolodesk {

struct Detection {
  BoxCorner box;
  int class_id = 0;
  std::string class_name;
  double objectness = 0;
  double class_score = 0;
  double confidence = 0;  // objectness * class_score
};

// Which score NMS thresholds and ranks on.
enum class ScoreField { kConfidence, kObjectness };

struct NmsConfig {
  double objectness_threshold = 0.25;
  double iou_threshold = 0.45;
  bool per_class = false;
  ScoreField score_field = ScoreField::kConfidence;
};

struct DetectConfig {
  NmsConfig nms;
  double confidence_floor = 0.5;
};

// Nine anchors, three per scale, ordered small to large. Scale 0 is the
// stride-8 grid.
using AnchorSet = std::array<Anchor, 9>;
AnchorSet default_anchors();

// One prediction per (cell, anchor slot): grid_n * grid_n * 3 entries, cells
// row-major, slots in order. Each slot spans 5 + C channels laid out as
// [t_x, t_y, t_w, t_h, objectness, class_0 .. class_{C-1}].
std::vector<RawPrediction> extract_predictions(const Tensor& head, std::span<const Anchor> anchors,
                                               int num_classes, int input_n, int scale_index = 0);

// Sigmoid on objectness and on every class logit; the best class (lowest id
// on ties) is assigned and confidence = objectness * best class score.
std::vector<Detection> score_predictions(std::span<const RawPrediction> raw,
                                         std::span<const std::string> class_names = {});

// Greedy suppression. Candidates scoring below the objectness threshold are
// dropped; the best remaining candidate is emitted and every candidate whose
// IoU with it reaches the IoU threshold is discarded, until none remain.
// Equal scores resolve to the lower input index. Output is in emission order.
std::vector<Detection> nms(std::span<const Detection> detections, const NmsConfig& config);

// Keeps detections with confidence >= floor, preserving order.
std::vector<Detection> two_stage_filter(std::span<const Detection> detections,
                                        double confidence_floor);

// Input resolution implied by three head grids; throws ShapeError when the
// grids are not N/8, N/16, N/32 of one N.
int infer_input_size(std::span<const Tensor> heads);

std::vector<Detection> detect_frame(std::span<const Tensor> heads, const AnchorSet& anchors,
                                    const DetectConfig& config,
                                    std::span<const std::string> class_names);

// `class_name confidence x_min y_min x_max y_max`, fixed six decimals.
std::string format_detection_line(const Detection& d);
std::string format_detections(std::span<const Detection> dets);
// Inverse of format_detections. Class ids are looked up in `class_names`
// when given, otherwise left at -1.
std::vector<Detection> parse_detections(std::string_view text,
                                        std::span<const std::string> class_names = {});

nlohmann::json detections_to_json(std::span<const Detection> dets);

// Synthetic heads whose decode reproduces the given ground truth: the hot
// slot of each object has objectness and class logits of +20, everything
// else -20. Objects sharing a cell pick the next-best free anchor slot.
struct TruthLabel {
  int class_id = 0;
  BoxNorm box;
};
std::array<Tensor, 3> encode_truth_heads(std::span<const TruthLabel> labels, const AnchorSet& anchors,
                                         int num_classes, int input_n);

}  // namespace yolodesk

#endif  // YOLODESK_POSTPROCESS_H_
