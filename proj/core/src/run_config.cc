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

#include "yolodesk/run_config.h"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "yolodesk/error.h"

namespace yolodesk {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_real(std::string_view v, int line) {
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ParseError(line, fmt::format("expected a number, got '{}'", v));
  }
  return out;
}

template <typename Int>
Int to_int(std::string_view v, int line) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ParseError(line, fmt::format("expected an integer, got '{}'", v));
  }
  return out;
}

bool to_bool(std::string_view v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError(line, fmt::format("expected true or false, got '{}'", v));
}

char flip_code(FlipAxis axis) { return axis == FlipAxis::kHorizontal ? 'h' : 'v'; }

using Setter = std::function<void(RunConfig&, std::string_view, int)>;

const std::map<std::string_view, Setter>& setters() {
  static const std::map<std::string_view, Setter> table = {
      {"input_n", [](RunConfig& c, std::string_view v, int l) { c.input_n = to_int<int>(v, l); }},
      {"classes", [](RunConfig& c, std::string_view v, int) { c.classes = std::string(v); }},
      {"anchors",
       [](RunConfig& c, std::string_view v, int l) {
         try {
           c.anchors = parse_anchors(v);
         } catch (const ParseError& e) {
           throw RangeError(l, e.what());
         }
       }},
      {"objectness_threshold",
       [](RunConfig& c, std::string_view v, int l) { c.detect.nms.objectness_threshold = to_real(v, l); }},
      {"iou_threshold",
       [](RunConfig& c, std::string_view v, int l) { c.detect.nms.iou_threshold = to_real(v, l); }},
      {"confidence_floor",
       [](RunConfig& c, std::string_view v, int l) { c.detect.confidence_floor = to_real(v, l); }},
      {"per_class", [](RunConfig& c, std::string_view v, int l) { c.detect.nms.per_class = to_bool(v, l); }},
      {"score_field",
       [](RunConfig& c, std::string_view v, int l) {
         if (v == "confidence") {
           c.detect.nms.score_field = ScoreField::kConfidence;
         } else if (v == "objectness") {
           c.detect.nms.score_field = ScoreField::kObjectness;
         } else {
           throw ParseError(l, fmt::format("score_field must be confidence or objectness, got '{}'", v));
         }
       }},
      {"rotations",
       [](RunConfig& c, std::string_view v, int l) {
         c.augment.rotations.clear();
         for (std::string_view d : split(v, ',')) c.augment.rotations.push_back(to_real(d, l));
       }},
      {"flips",
       [](RunConfig& c, std::string_view v, int l) {
         c.augment.flips.clear();
         if (v == "none") return;
         for (std::string_view f : split(v, ',')) {
           if (f == "h") {
             c.augment.flips.push_back(FlipAxis::kHorizontal);
           } else if (f == "v") {
             c.augment.flips.push_back(FlipAxis::kVertical);
           } else {
             throw ParseError(l, fmt::format("flip axis must be h or v, got '{}'", f));
           }
         }
       }},
      {"clockwise", [](RunConfig& c, std::string_view v, int l) { c.augment.clockwise = to_bool(v, l); }},
      {"min_visible_fraction",
       [](RunConfig& c, std::string_view v, int l) {
         c.augment.rotate.min_visible_fraction = to_real(v, l);
       }},
      {"class_floor", [](RunConfig& c, std::string_view v, int l) { c.augment.class_floor = to_int<int>(v, l); }},
      {"seed", [](RunConfig& c, std::string_view v, int l) { c.seed = to_int<std::uint64_t>(v, l); }},
  };
  return table;
}

}  // namespace

AnchorSet parse_anchors(std::string_view text) {
  std::vector<double> values;
  for (std::string_view pair : split(text, ' ')) {
    if (pair.empty()) continue;
    for (std::string_view part : split(pair, ',')) values.push_back(to_real(part, 0));
  }
  AnchorSet out;
  if (values.size() != 2 * out.size()) {
    throw RangeError(0, fmt::format("anchors needs 9 w,h pairs, got {} values", values.size()));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(values[2 * i] > 0) || !(values[2 * i + 1] > 0)) throw RangeError(0, "anchor sizes must be positive");
    out[i] = {values[2 * i], values[2 * i + 1]};
  }
  return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return format_run_config(a) == format_run_config(b);
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig config;
  std::map<std::string_view, int> seen;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? text.npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, fmt::format("expected key = value, got '{}'", line));
    const std::string_view key = trim(line.substr(0, eq));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ParseError(line_no, fmt::format("unknown key '{}'", key));
    if (!seen.emplace(key, line_no).second) throw ParseError(line_no, fmt::format("duplicate key '{}'", key));
    it->second(config, trim(line.substr(eq + 1)), line_no);
  }
  validate(config);
  return config;
}

std::string format_run_config(const RunConfig& c) {
  std::vector<std::string> anchors;
  for (const Anchor& a : c.anchors) anchors.push_back(fmt::format("{},{}", a.p_w, a.p_h));
  std::vector<std::string> rotations;
  for (double d : c.augment.rotations) rotations.push_back(fmt::format("{}", d));
  std::string flips;
  for (FlipAxis f : c.augment.flips) {
    if (!flips.empty()) flips += ',';
    flips += flip_code(f);
  }
  if (flips.empty()) flips = "none";

  std::string out;
  out += fmt::format("input_n = {}\n", c.input_n);
  out += fmt::format("classes = {}\n", c.classes);
  out += fmt::format("anchors = {}\n", fmt::join(anchors, " "));
  out += fmt::format("objectness_threshold = {}\n", c.detect.nms.objectness_threshold);
  out += fmt::format("iou_threshold = {}\n", c.detect.nms.iou_threshold);
  out += fmt::format("confidence_floor = {}\n", c.detect.confidence_floor);
  out += fmt::format("per_class = {}\n", c.detect.nms.per_class);
  out += fmt::format("score_field = {}\n",
                     c.detect.nms.score_field == ScoreField::kConfidence ? "confidence" : "objectness");
  out += fmt::format("rotations = {}\n", fmt::join(rotations, ","));
  out += fmt::format("flips = {}\n", flips);
  out += fmt::format("clockwise = {}\n", c.augment.clockwise);
  out += fmt::format("min_visible_fraction = {}\n", c.augment.rotate.min_visible_fraction);
  out += fmt::format("class_floor = {}\n", c.augment.class_floor);
  out += fmt::format("seed = {}\n", c.seed);
  return out;
}

void validate(const RunConfig& c) {
  if (c.input_n <= 0 || c.input_n % 32 != 0) {
    throw RangeError(0, fmt::format("input_n {} not multiple of 32", c.input_n));
  }
  for (const Anchor& a : c.anchors) {
    if (!(a.p_w > 0) || !(a.p_h > 0)) throw RangeError(0, "anchor sizes must be positive");
  }
  const auto unit = [](double v, std::string_view name) {
    if (!(v >= 0 && v <= 1)) throw RangeError(0, fmt::format("{} = {} outside [0, 1]", name, v));
  };
  unit(c.detect.nms.objectness_threshold, "objectness_threshold");
  unit(c.detect.nms.iou_threshold, "iou_threshold");
  unit(c.detect.confidence_floor, "confidence_floor");
  unit(c.augment.rotate.min_visible_fraction, "min_visible_fraction");
  if (c.augment.class_floor < 0) throw RangeError(0, "class_floor must be non-negative");
}

}  // namespace yolodesk
