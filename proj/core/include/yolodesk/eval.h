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

#ifndef YOLODESK_EVAL_H_
#define YOLODESK_EVAL_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "yolodesk/postprocess.h"

namespace yolodesk {

struct GroundTruth {
  int class_id = 0;
  BoxCorner box;
};

// Detections and ground truth of one image, in the same coordinate frame.
struct ImageEval {
  std::string name;
  std::vector<Detection> detections;
  std::vector<GroundTruth> truths;
};

struct DetectionMatch {
  std::size_t detection_index = 0;  // position in the input list
  int gt_index = -1;                // -1: false positive
  double iou = 0;
};

struct MatchResult {
  std::vector<DetectionMatch> per_detection;  // in descending confidence order
  std::vector<bool> gt_matched;
};

// Detections are visited by descending confidence (lower index first on
// ties); each takes the unmatched same-class ground truth of highest IoU, if
// that IoU reaches the threshold. Equal IoUs go to the lower gt index.
MatchResult match_detections(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                             double iou_threshold);

// The ten IoU thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> coco_iou_thresholds();

// 101-point interpolated AP of one class: precision at recall r is the best
// precision at any recall >= r, averaged over r = 0, 0.01, ..., 1. Empty
// when the class has no ground truth.
std::optional<double> average_precision(std::span<const ImageEval> images, int class_id,
                                        double iou_threshold);

struct ConfidenceStats {
  double min = 0;
  double max = 0;
  double mean = 0;
  int count = 0;
};

struct EvalReport {
  std::vector<double> thresholds;
  std::map<int, std::vector<double>> per_class_ap;  // class -> AP per threshold
  double map_50_95 = 0;
  double map_50 = 0;
  // Per-image outcome at IoU 0.5.
  int images = 0;
  int failed_images = 0;
  int unmatched_truths = 0;
  int false_positives = 0;
  double error_rate = 0;  // failed_images / images
  ConfidenceStats confidence;
  std::string scenario;
};

// Throws RangeError when the dataset holds no ground truth at all.
EvalReport map_50_95(std::span<const ImageEval> images);

// map_50_95 plus the scenario tag. An image fails when it has an unmatched
// ground truth or a false positive at IoU 0.5.
EvalReport scenario_report(std::span<const ImageEval> images, std::string_view scenario);

nlohmann::json report_to_json(const EvalReport& report, std::span<const std::string> class_names = {});
std::string report_table(const EvalReport& report, std::span<const std::string> class_names = {});

}  // namespace yolodesk

#endif  // YOLODESK_EVAL_H_
