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

#include "yolodesk/eval.h"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "yolodesk/error.h"
#include "yolodesk/synth.h"

namespace yolodesk {

namespace {

constexpr int kRecallPoints = 101;

struct RankedHit {
  double confidence;
  std::size_t image;
  std::size_t rank;
  bool true_positive;
};

std::string class_label(int id, std::span<const std::string> names) {
  return id >= 0 && static_cast<std::size_t>(id) < names.size() ? names[id] : std::to_string(id);
}

}  // namespace

MatchResult match_detections(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                             double iou_threshold) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].confidence > dets[b].confidence; });

  MatchResult result;
  result.gt_matched.assign(gts.size(), false);
  for (std::size_t d : order) {
    DetectionMatch m{d, -1, 0.0};
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (result.gt_matched[g] || gts[g].class_id != dets[d].class_id) continue;
      const double v = iou(dets[d].box, gts[g].box);
      if (v >= iou_threshold && (m.gt_index < 0 || v > m.iou)) {
        m.gt_index = static_cast<int>(g);
        m.iou = v;
      }
    }
    if (m.gt_index >= 0) result.gt_matched[m.gt_index] = true;
    result.per_detection.push_back(m);
  }
  return result;
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> out;
  for (int i = 0; i < 10; ++i) out.push_back((50 + 5 * i) / 100.0);
  return out;
}

std::optional<double> average_precision(std::span<const ImageEval> images, int class_id,
                                        double iou_threshold) {
  std::size_t positives = 0;
  std::vector<RankedHit> hits;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const ImageEval& img = images[i];
    positives += static_cast<std::size_t>(std::count_if(
        img.truths.begin(), img.truths.end(), [&](const GroundTruth& g) { return g.class_id == class_id; }));
    const MatchResult m = match_detections(img.detections, img.truths, iou_threshold);
    for (std::size_t r = 0; r < m.per_detection.size(); ++r) {
      const DetectionMatch& dm = m.per_detection[r];
      const Detection& det = img.detections[dm.detection_index];
      if (det.class_id != class_id) continue;
      hits.push_back({det.confidence, i, r, dm.gt_index >= 0});
    }
  }
  if (positives == 0) return std::nullopt;

  std::sort(hits.begin(), hits.end(), [](const RankedHit& a, const RankedHit& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.image != b.image) return a.image < b.image;
    return a.rank < b.rank;
  });

  std::vector<double> precision(hits.size());
  std::vector<double> recall(hits.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < hits.size(); ++k) {
    tp += hits[k].true_positive;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(tp) / static_cast<double>(positives);
  }
  for (std::size_t k = hits.size(); k-- > 1;) precision[k - 1] = std::max(precision[k - 1], precision[k]);

  double sum = 0;
  for (int p = 0; p < kRecallPoints; ++p) {
    const double r = p / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / kRecallPoints;
}

EvalReport map_50_95(std::span<const ImageEval> images) {
  EvalReport report;
  report.thresholds = coco_iou_thresholds();

  std::vector<int> classes;
  for (const ImageEval& img : images) {
    for (const GroundTruth& g : img.truths) classes.push_back(g.class_id);
  }
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.empty()) throw RangeError(0, "evaluation needs at least one ground-truth box");

  std::vector<double> per_threshold(report.thresholds.size(), 0.0);
  for (int c : classes) {
    auto& aps = report.per_class_ap[c];
    for (std::size_t t = 0; t < report.thresholds.size(); ++t) {
      aps.push_back(*average_precision(images, c, report.thresholds[t]));
      per_threshold[t] += aps.back();
    }
  }
  for (double& v : per_threshold) v /= static_cast<double>(classes.size());
  report.map_50 = per_threshold.front();
  report.map_50_95 = std::accumulate(per_threshold.begin(), per_threshold.end(), 0.0) /
                     static_cast<double>(per_threshold.size());

  double conf_sum = 0;
  for (const ImageEval& img : images) {
    const MatchResult m = match_detections(img.detections, img.truths, 0.5);
    const int missed = static_cast<int>(std::count(m.gt_matched.begin(), m.gt_matched.end(), false));
    int false_pos = 0;
    for (const DetectionMatch& dm : m.per_detection) {
      if (dm.gt_index < 0) {
        ++false_pos;
        continue;
      }
      const double c = img.detections[dm.detection_index].confidence;
      ConfidenceStats& s = report.confidence;
      s.min = s.count == 0 ? c : std::min(s.min, c);
      s.max = s.count == 0 ? c : std::max(s.max, c);
      ++s.count;
      conf_sum += c;
    }
    ++report.images;
    report.unmatched_truths += missed;
    report.false_positives += false_pos;
    report.failed_images += (missed > 0 || false_pos > 0);
  }
  if (report.confidence.count > 0) report.confidence.mean = conf_sum / report.confidence.count;
  report.error_rate = static_cast<double>(report.failed_images) / static_cast<double>(report.images);
  return report;
}

EvalReport scenario_report(std::span<const ImageEval> images, std::string_view scenario) {
  const Scenario parsed = parse_scenario(scenario);
  EvalReport report = map_50_95(images);
  report.scenario = std::string(scenario_tag(parsed));
  return report;
}

nlohmann::json report_to_json(const EvalReport& report, std::span<const std::string> class_names) {
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [c, aps] : report.per_class_ap) {
    nlohmann::json by_threshold = nlohmann::json::object();
    for (std::size_t t = 0; t < aps.size(); ++t) {
      by_threshold[fmt::format("{:.2f}", report.thresholds[t])] = aps[t];
    }
    per_class[class_label(c, class_names)] = std::move(by_threshold);
  }
  nlohmann::json out = {{"map_50_95", report.map_50_95},
                        {"map_50", report.map_50},
                        {"per_class_ap", std::move(per_class)},
                        {"images", report.images},
                        {"failed_images", report.failed_images},
                        {"unmatched_truths", report.unmatched_truths},
                        {"false_positives", report.false_positives},
                        {"error_rate", report.error_rate},
                        {"confidence",
                         {{"min", report.confidence.min},
                          {"max", report.confidence.max},
                          {"mean", report.confidence.mean},
                          {"count", report.confidence.count}}}};
  if (!report.scenario.empty()) out["scenario"] = report.scenario;
  return out;
}

std::string report_table(const EvalReport& report, std::span<const std::string> class_names) {
  std::string out = fmt::format("{:<14}", "class");
  for (double t : report.thresholds) out += fmt::format(" {:>6.2f}", t);
  out += '\n';
  for (const auto& [c, aps] : report.per_class_ap) {
    out += fmt::format("{:<14}", class_label(c, class_names));
    for (double ap : aps) out += fmt::format(" {:>6.4f}", ap);
    out += '\n';
  }
  if (!report.scenario.empty()) out += fmt::format("scenario: {}\n", report.scenario);
  out += fmt::format("mAP@0.50:      {:.6f}\n", report.map_50);
  out += fmt::format("mAP@0.50:0.95: {:.6f}\n", report.map_50_95);
  out += fmt::format("images: {}  failed: {}  error rate: {:.6f}\n", report.images,
                     report.failed_images, report.error_rate);
  out += fmt::format("unmatched truths: {}  false positives: {}\n", report.unmatched_truths,
                     report.false_positives);
  out += fmt::format("matched confidence min/mean/max: {:.6f} / {:.6f} / {:.6f}\n",
                     report.confidence.min, report.confidence.mean, report.confidence.max);
  return out;
}

}  // namespace yolodesk
