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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "yolodesk/error.h"
#include "yolodesk/eval.h"
#include "yolodesk/synth.h"

namespace yolodesk {
namespace {

Detection det(double x0, double y0, double x1, double y1, int cls, double conf) {
  Detection d;
  d.box = {x0, y0, x1, y1};
  d.class_id = cls;
  d.confidence = conf;
  d.objectness = conf;
  d.class_score = 1;
  return d;
}

Detection det_on(const GroundTruth& g, double conf) {
  return det(g.box.x_min, g.box.y_min, g.box.x_max, g.box.y_max, g.class_id, conf);
}

// Small random image: boxes on a 0..20 grid so IoUs collide with thresholds
// often enough; confidences distinct across the whole dataset.
std::vector<ImageEval> random_instance(std::mt19937_64& rng, int classes, int max_images = 3) {
  std::uniform_int_distribution<int> n_img(1, max_images), n_det(0, 10), n_gt(0, 6), cls(0, classes - 1);
  std::uniform_int_distribution<int> pos(0, 16), size(2, 8);
  std::uniform_real_distribution<double> conf(0.01, 1.0);
  std::vector<ImageEval> images(static_cast<std::size_t>(n_img(rng)));
  for (auto& img : images) {
    for (int i = n_gt(rng); i > 0; --i) {
      const int x = pos(rng), y = pos(rng);
      img.truths.push_back({cls(rng), BoxCorner{double(x), double(y), double(x + size(rng)), double(y + size(rng))}});
    }
    for (int i = n_det(rng); i > 0; --i) {
      if (!img.truths.empty() && i % 2 == 0) {
        // Perturbed copy of a truth.
        const auto& g = img.truths[std::uniform_int_distribution<std::size_t>(0, img.truths.size() - 1)(rng)];
        std::uniform_int_distribution<int> j(-1, 1);
        img.detections.push_back(det(g.box.x_min + j(rng), g.box.y_min + j(rng), g.box.x_max + j(rng),
                                     g.box.y_max + j(rng), i % 4 == 0 ? cls(rng) : g.class_id, conf(rng)));
      } else {
        const int x = pos(rng), y = pos(rng);
        img.detections.push_back(det(x, y, x + size(rng), y + size(rng), cls(rng), conf(rng)));
      }
    }
  }
  return images;
}

std::vector<ImageEval> perfect_scenario(Scenario s, int count) {
  const ClassRegistry reg = default_part_registry();
  std::vector<ImageEval> images;
  for (const Scene& scene : generate_scenario(s, 7, count, reg)) {
    ImageEval img;
    img.name = scene.sample.source_path;
    for (const auto& l : scene.sample.labels) {
      img.truths.push_back({l.class_id, norm_to_corner(l.box, 608, 608)});
      img.detections.push_back(det_on(img.truths.back(), 1.0));
    }
    images.push_back(std::move(img));
  }
  return images;
}

TEST(Match, Examples) {
  const std::vector<GroundTruth> gts = {{0, BoxCorner{0, 0, 10, 10}}};
  const std::vector<Detection> one = {det(0, 0, 10, 10, 0, 0.9)};
  const MatchResult m = match_detections(one, gts, 0.5);
  ASSERT_EQ(m.per_detection.size(), 1u);
  EXPECT_EQ(m.per_detection[0].gt_index, 0);
  EXPECT_EQ(m.per_detection[0].iou, 1.0);
  EXPECT_TRUE(m.gt_matched[0]);

  const std::vector<Detection> two = {det(0, 0, 10, 10, 0, 0.6), det(0, 0, 10, 9, 0, 0.8)};
  const MatchResult m2 = match_detections(two, gts, 0.5);
  EXPECT_EQ(m2.per_detection[0].detection_index, 1u);
  EXPECT_EQ(m2.per_detection[0].gt_index, 0);
  EXPECT_EQ(m2.per_detection[1].gt_index, -1);

  const std::vector<Detection> wrong_class = {det(0, 0, 10, 10, 1, 0.9)};
  EXPECT_EQ(match_detections(wrong_class, gts, 0.5).per_detection[0].gt_index, -1);
  const std::vector<Detection> weak = {det(5, 0, 15, 10, 0, 0.9)};
  EXPECT_EQ(match_detections(weak, gts, 0.5).per_detection[0].gt_index, -1);
  EXPECT_EQ(match_detections(weak, gts, 1.0 / 3).per_detection[0].gt_index, 0);
}

TEST(Match, TiesGoToLowerIndex) {
  const std::vector<GroundTruth> gts = {{0, BoxCorner{0, 0, 10, 10}}, {0, BoxCorner{0, 0, 10, 10}}};
  const std::vector<Detection> dets = {det(0, 0, 10, 10, 0, 0.5), det(0, 0, 10, 10, 0, 0.5)};
  const MatchResult m = match_detections(dets, gts, 0.5);
  EXPECT_EQ(m.per_detection[0].detection_index, 0u);
  EXPECT_EQ(m.per_detection[0].gt_index, 0);
  EXPECT_EQ(m.per_detection[1].gt_index, 1);
}

TEST(Match, AgreesWithBruteForce) {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 2000; ++trial) {
    auto images = random_instance(rng, 2, 1);
    auto& img = images[0];
    img.detections.resize(std::min<std::size_t>(img.detections.size(), 5));
    img.truths.resize(std::min<std::size_t>(img.truths.size(), 4));
    for (double thr : {0.3, 0.5, 0.75}) {
      const MatchResult m = match_detections(img.detections, img.truths, thr);
      const std::vector<int> expected = oracle::match(img.detections, img.truths, thr);
      std::vector<int> seen(img.truths.size(), 0);
      for (const DetectionMatch& dm : m.per_detection) {
        ASSERT_EQ(dm.gt_index, expected[dm.detection_index]);
        if (dm.gt_index >= 0) {
          ASSERT_EQ(++seen[dm.gt_index], 1);
          ASSERT_GE(dm.iou, thr);
          ASSERT_TRUE(m.gt_matched[dm.gt_index]);
        }
      }
      for (std::size_t k = 1; k < m.per_detection.size(); ++k) {
        ASSERT_GE(img.detections[m.per_detection[k - 1].detection_index].confidence,
                  img.detections[m.per_detection[k].detection_index].confidence);
      }
    }
  }
}

TEST(AveragePrecision, Examples) {
  const std::vector<GroundTruth> gts = {{0, BoxCorner{0, 0, 10, 10}}, {0, BoxCorner{20, 20, 30, 30}}};
  std::vector<ImageEval> perfect = {{"a", {det_on(gts[0], 0.9), det_on(gts[1], 0.8)}, gts}};
  EXPECT_EQ(*average_precision(perfect, 0, 0.5), 1.0);

  std::vector<ImageEval> nothing = {{"a", {}, gts}};
  EXPECT_EQ(*average_precision(nothing, 0, 0.5), 0.0);
  EXPECT_FALSE(average_precision(nothing, 1, 0.5).has_value());

  // TP, FP, TP: precision 1, 1/2, 2/3 at recall 1/2, 1/2, 1. The envelope is 1
  // for the 51 recall points up to 0.5 and 2/3 for the remaining 50.
  std::vector<ImageEval> mixed = {
      {"a", {det_on(gts[0], 0.9), det(50, 50, 60, 60, 0, 0.8), det_on(gts[1], 0.7)}, gts}};
  const double hand = (51.0 + 50.0 * 2.0 / 3.0) / 101.0;
  EXPECT_NEAR(*average_precision(mixed, 0, 0.5), hand, 1e-12);
  EXPECT_NEAR(oracle::average_precision(mixed, 0, 0.5), hand, 1e-12);
}

TEST(AveragePrecision, AgreesWithOracleOnRandomInstances) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    const auto images = random_instance(rng, 3);
    bool any_truth = false;
    for (const auto& img : images) any_truth |= !img.truths.empty();
    for (int cls = 0; cls < 3; ++cls) {
      for (double thr : coco_iou_thresholds()) {
        const auto ap = average_precision(images, cls, thr);
        const double expected = oracle::average_precision(images, cls, thr);
        if (std::isnan(expected)) {
          ASSERT_FALSE(ap.has_value());
        } else {
          ASSERT_TRUE(ap.has_value());
          ASSERT_NEAR(*ap, expected, 1e-12) << trial;
        }
      }
    }
    if (any_truth) {
      ASSERT_NEAR(map_50_95(images).map_50_95, oracle::map_50_95(images), 1e-12) << trial;
    } else {
      ASSERT_THROW(map_50_95(images), RangeError);
    }
  }
}

TEST(AveragePrecision, Properties) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    auto images = random_instance(rng, 2);
    for (int cls = 0; cls < 2; ++cls) {
      const auto base = average_precision(images, cls, 0.5);
      if (!base) continue;
      double previous = 2;
      for (double thr : coco_iou_thresholds()) {
        const double ap = *average_precision(images, cls, thr);
        ASSERT_LE(ap, previous + 1e-15);
        ASSERT_GE(ap, 0.0);
        ASSERT_LE(ap, 1.0);
        previous = ap;
      }

      auto extra = images;
      extra[0].detections.push_back(det(0, 0, 3, 3, cls, 0.001));
      ASSERT_LE(*average_precision(extra, cls, 0.5), *base + 1e-15);

      auto doubled = images;
      doubled.insert(doubled.end(), images.begin(), images.end());
      ASSERT_NEAR(*average_precision(doubled, cls, 0.5), *base, 1e-12);

      auto shuffled = images;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      ASSERT_EQ(*average_precision(shuffled, cls, 0.5), *base);
    }
  }
}

TEST(Map, PerfectDetectorOnScenarios) {
  for (Scenario s : {Scenario::kSingleClass, Scenario::kMultiClassGroup, Scenario::kAllClasses}) {
    const auto images = perfect_scenario(s, 50);
    const EvalReport r = scenario_report(images, scenario_tag(s));
    EXPECT_EQ(r.map_50_95, 1.0);
    EXPECT_EQ(r.map_50, 1.0);
    EXPECT_EQ(r.error_rate, 0.0);
    EXPECT_EQ(r.images, 50);
    EXPECT_EQ(r.thresholds.size(), 10u);
    for (const auto& [cls, aps] : r.per_class_ap) {
      for (double ap : aps) EXPECT_EQ(ap, 1.0) << cls;
    }
    EXPECT_EQ(r.confidence.min, 1.0);
  }
}

TEST(Map, NoDetectionsAndEmptyTruth) {
  auto images = perfect_scenario(Scenario::kMultiClassGroup, 5);
  for (auto& img : images) img.detections.clear();
  EXPECT_EQ(map_50_95(images).map_50_95, 0.0);
  std::vector<ImageEval> empty = {{"a", {det(0, 0, 1, 1, 0, 0.5)}, {}}};
  EXPECT_THROW(map_50_95(empty), RangeError);
  EXPECT_THROW(map_50_95({}), RangeError);
}

TEST(Map, JitteredBoxesMatchOracle) {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> jitter(-2, 2);
  std::uniform_real_distribution<double> conf(0.5, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ImageEval> images;
    for (int i = 0; i < 4; ++i) {
      ImageEval img;
      for (int k = 0; k < 3; ++k) {
        const double x = 70.0 * k + 5, y = 10.0 * i;
        img.truths.push_back({k % 2, BoxCorner{x, y, x + 60, y + 60}});
        const auto& g = img.truths.back();
        img.detections.push_back(det(g.box.x_min + jitter(rng), g.box.y_min + jitter(rng), g.box.x_max + jitter(rng),
                                     g.box.y_max + jitter(rng), g.class_id, conf(rng)));
      }
      images.push_back(std::move(img));
    }
    EXPECT_NEAR(map_50_95(images).map_50_95, oracle::map_50_95(images), 1e-12);
  }
}

TEST(Map, ExcludesClassesWithoutTruth) {
  std::vector<ImageEval> images = {{"a", {det(0, 0, 10, 10, 0, 0.9), det(0, 0, 10, 10, 5, 0.9)},
                                    {{0, BoxCorner{0, 0, 10, 10}}}}};
  const EvalReport r = map_50_95(images);
  EXPECT_EQ(r.map_50_95, 1.0);
  EXPECT_EQ(r.per_class_ap.count(5), 0u);
}

TEST(ScenarioReport, ErrorRates) {
  auto images = perfect_scenario(Scenario::kSingleClass, 50);
  images[3].detections.clear();
  images[17].detections.push_back(det(0, 0, 5, 5, 0, 0.4));
  const EvalReport r = scenario_report(images, "single-class");
  EXPECT_EQ(r.failed_images, 2);
  EXPECT_DOUBLE_EQ(r.error_rate, 0.04);
  EXPECT_EQ(r.unmatched_truths, 1);
  EXPECT_EQ(r.false_positives, 1);

  std::vector<ImageEval> one = {{"x", {}, {{0, BoxCorner{0, 0, 4, 4}}}}};
  EXPECT_EQ(scenario_report(one, "1").error_rate, 1.0);
  EXPECT_THROW(scenario_report(one, "outdoor"), RangeError);
}

TEST(Report, JsonAndTable) {
  const auto images = perfect_scenario(Scenario::kAllClasses, 2);
  const EvalReport r = scenario_report(images, "3");
  const auto reg = default_part_registry();
  std::vector<std::string> names(reg.names().begin(), reg.names().end());
  const nlohmann::json j = report_to_json(r, names);
  EXPECT_EQ(j["map_50_95"], 1.0);
  EXPECT_EQ(j["error_rate"], 0.0);
  EXPECT_EQ(j["per_class_ap"]["gear"]["0.50"], 1.0);
  EXPECT_EQ(j["per_class_ap"]["plate"]["0.95"], 1.0);
  EXPECT_EQ(j["scenario"], "all-classes");
  EXPECT_EQ(j.dump(), report_to_json(scenario_report(images, "3"), names).dump());
  EXPECT_NE(report_table(r, names).find("gear"), std::string::npos);
}

TEST(Thresholds, Values) {
  const auto t = coco_iou_thresholds();
  ASSERT_EQ(t.size(), 10u);
  EXPECT_EQ(t.front(), 0.5);
  EXPECT_EQ(t.back(), 0.95);
  EXPECT_EQ(t[3], 0.65);
}

}  // namespace
}  // namespace yolodesk
