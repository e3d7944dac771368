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

#include "yolodesk/postprocess.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "yolodesk/error.h"
#include "yolodesk/netdef.h"

namespace yolodesk {

namespace {

double score_of(const Detection& d, ScoreField field) {
  return field == ScoreField::kConfidence ? d.confidence : d.objectness;
}

// Uniform bucket grid over the kept boxes. Two boxes with positive overlap
// always share at least one bucket.
class BucketGrid {
 public:
  BucketGrid(std::span<const Detection> dets, std::span<const std::size_t> order) {
    if (order.empty()) return;
    x0_ = y0_ = std::numeric_limits<double>::infinity();
    double x1 = -x0_, y1 = -y0_, sum_w = 0, sum_h = 0;
    for (std::size_t i : order) {
      const BoxCorner& b = dets[i].box;
      x0_ = std::min(x0_, b.x_min);
      y0_ = std::min(y0_, b.y_min);
      x1 = std::max(x1, b.x_max);
      y1 = std::max(y1, b.y_max);
      sum_w += b.width();
      sum_h += b.height();
    }
    const double n = static_cast<double>(order.size());
    nx_ = axis_cells(x1 - x0_, sum_w / n);
    ny_ = axis_cells(y1 - y0_, sum_h / n);
    cell_w_ = std::max((x1 - x0_) / nx_, 1e-300);
    cell_h_ = std::max((y1 - y0_) / ny_, 1e-300);
    buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
    stamp_.assign(dets.size(), 0);
  }

  void insert(std::size_t id, const BoxCorner& b) {
    const auto [cx0, cx1, cy0, cy1] = range(b);
    for (int y = cy0; y <= cy1; ++y) {
      for (int x = cx0; x <= cx1; ++x) buckets_[static_cast<std::size_t>(y) * nx_ + x].push_back(id);
    }
  }

  template <typename Pred>
  bool any_of_near(const BoxCorner& b, Pred pred) {
    ++generation_;
    const auto [cx0, cx1, cy0, cy1] = range(b);
    for (int y = cy0; y <= cy1; ++y) {
      for (int x = cx0; x <= cx1; ++x) {
        for (std::size_t id : buckets_[static_cast<std::size_t>(y) * nx_ + x]) {
          if (stamp_[id] == generation_) continue;
          stamp_[id] = generation_;
          if (pred(id)) return true;
        }
      }
    }
    return false;
  }

 private:
  static int axis_cells(double extent, double mean_side) {
    if (!(extent > 0) || !(mean_side > 0)) return 1;
    return static_cast<int>(std::clamp(std::ceil(extent / mean_side), 1.0, 128.0));
  }

  int cell(double v, double origin, double size, int n) const {
    const double c = std::floor((v - origin) / size);
    if (!(c >= 0)) return 0;
    return c >= n ? n - 1 : static_cast<int>(c);
  }

  std::array<int, 4> range(const BoxCorner& b) const {
    return {cell(b.x_min, x0_, cell_w_, nx_), cell(b.x_max, x0_, cell_w_, nx_),
            cell(b.y_min, y0_, cell_h_, ny_), cell(b.y_max, y0_, cell_h_, ny_)};
  }

  double x0_ = 0, y0_ = 0, cell_w_ = 1, cell_h_ = 1;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::size_t>> buckets_;
  std::vector<unsigned> stamp_;
  unsigned generation_ = 0;
};

}  // namespace

AnchorSet default_anchors() {
  return {{{12, 16}, {19, 36}, {40, 28}, {36, 75}, {76, 55}, {72, 146}, {142, 110}, {192, 243}, {459, 401}}};
}

std::vector<RawPrediction> extract_predictions(const Tensor& head, std::span<const Anchor> anchors,
                                               int num_classes, int input_n, int scale_index) {
  const int expected = head_channels(num_classes);
  if (head.channels() != expected) {
    throw ShapeError(fmt::format("head has {} channels but {} classes need 3*(5+{}) = {}",
                                 head.channels(), num_classes, num_classes, expected));
  }
  if (head.height() != head.width()) {
    throw ShapeError(fmt::format("head grid must be square, got {}x{}", head.height(), head.width()));
  }
  if (anchors.size() != 3) {
    throw ShapeError(fmt::format("a head scale needs 3 anchors, got {}", anchors.size()));
  }
  const int grid_n = head.height();
  const int slot_width = 5 + num_classes;
  std::vector<RawPrediction> out;
  out.reserve(static_cast<std::size_t>(grid_n) * grid_n * 3);
  for (int row = 0; row < grid_n; ++row) {
    for (int col = 0; col < grid_n; ++col) {
      const auto px = head.pixel(row, col);
      for (int slot = 0; slot < 3; ++slot) {
        const double* v = px.data() + slot * slot_width;
        RawPrediction& p = out.emplace_back();
        p.t_x = v[0];
        p.t_y = v[1];
        p.t_w = v[2];
        p.t_h = v[3];
        p.objectness_logit = v[4];
        p.class_logits.assign(v + 5, v + slot_width);
        p.cell = {row, col};
        p.scale_index = scale_index;
        p.anchor_slot = slot;
        p.anchor = anchors[slot];
        p.grid_n = grid_n;
        p.input_n = input_n;
      }
    }
  }
  return out;
}

std::vector<Detection> score_predictions(std::span<const RawPrediction> raw,
                                         std::span<const std::string> class_names) {
  std::vector<Detection> out;
  out.reserve(raw.size());
  for (const RawPrediction& p : raw) {
    Detection& d = out.emplace_back();
    d.objectness = sigmoid(p.objectness_logit);
    double best = -1.0;
    for (std::size_t c = 0; c < p.class_logits.size(); ++c) {
      const double s = sigmoid(p.class_logits[c]);
      if (s > best) {
        best = s;
        d.class_id = static_cast<int>(c);
      }
    }
    d.class_score = std::max(best, 0.0);
    d.confidence = d.objectness * d.class_score;
    d.class_name = static_cast<std::size_t>(d.class_id) < class_names.size()
                       ? class_names[d.class_id]
                       : std::to_string(d.class_id);
    d.box = decode_box(p);
  }
  return out;
}

std::vector<Detection> nms(std::span<const Detection> detections, const NmsConfig& config) {
  std::vector<std::size_t> order;
  order.reserve(detections.size());
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (score_of(detections[i], config.score_field) >= config.objectness_threshold) {
      order.push_back(i);
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return score_of(detections[a], config.score_field) > score_of(detections[b], config.score_field);
  });

  std::vector<Detection> kept;
  const auto same_group = [&](std::size_t a, std::size_t b) {
    return !config.per_class || detections[a].class_id == detections[b].class_id;
  };

  if (config.iou_threshold <= 0.0) {
    // Every pair reaches an IoU of at least zero, so the first member of each
    // group suppresses the rest of it.
    std::vector<std::size_t> leaders;
    for (std::size_t i : order) {
      const bool taken = std::any_of(leaders.begin(), leaders.end(),
                                     [&](std::size_t k) { return same_group(k, i); });
      if (!taken) {
        leaders.push_back(i);
        kept.push_back(detections[i]);
      }
    }
    return kept;
  }

  BucketGrid grid(detections, order);
  for (std::size_t i : order) {
    const BoxCorner& box = detections[i].box;
    const bool suppressed = grid.any_of_near(box, [&](std::size_t k) {
      return same_group(k, i) && iou(detections[k].box, box) >= config.iou_threshold;
    });
    if (suppressed) continue;
    grid.insert(i, box);
    kept.push_back(detections[i]);
  }
  return kept;
}

std::vector<Detection> two_stage_filter(std::span<const Detection> detections,
                                        double confidence_floor) {
  std::vector<Detection> out;
  std::copy_if(detections.begin(), detections.end(), std::back_inserter(out),
               [confidence_floor](const Detection& d) { return d.confidence >= confidence_floor; });
  return out;
}

int infer_input_size(std::span<const Tensor> heads) {
  if (heads.size() != 3) {
    throw ShapeError(fmt::format("expected 3 head tensors, got {}", heads.size()));
  }
  const int input_n = heads[0].height() * 8;
  static constexpr int kStrides[] = {8, 16, 32};
  for (int s = 0; s < 3; ++s) {
    const Tensor& h = heads[s];
    if (h.height() != h.width() || h.height() * kStrides[s] != input_n) {
      throw ShapeError(fmt::format("head {} is {}x{}, expected {}x{} for a {} input", s, h.height(),
                                   h.width(), input_n / kStrides[s], input_n / kStrides[s], input_n));
    }
  }
  require_stride_multiple(input_n);
  return input_n;
}

std::vector<Detection> detect_frame(std::span<const Tensor> heads, const AnchorSet& anchors,
                                    const DetectConfig& config,
                                    std::span<const std::string> class_names) {
  const int input_n = infer_input_size(heads);
  const int num_classes = heads[0].channels() / 3 - 5;
  std::vector<Detection> scored;
  for (int s = 0; s < 3; ++s) {
    const auto raw = extract_predictions(heads[s], std::span(anchors).subspan(3 * s, 3), num_classes,
                                         input_n, s);
    auto dets = score_predictions(raw, class_names);
    scored.insert(scored.end(), std::make_move_iterator(dets.begin()),
                  std::make_move_iterator(dets.end()));
  }
  const auto kept = nms(scored, config.nms);
  return two_stage_filter(kept, config.confidence_floor);
}

std::string format_detection_line(const Detection& d) {
  if (d.class_name.empty() ||
      std::any_of(d.class_name.begin(), d.class_name.end(),
                  [](unsigned char c) { return std::isspace(c) != 0; })) {
    throw RangeError(0, fmt::format("class name '{}' cannot be written as a detection line", d.class_name));
  }
  return fmt::format("{} {:.6f} {:.6f} {:.6f} {:.6f} {:.6f}", d.class_name, d.confidence,
                     d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max);
}

std::string format_detections(std::span<const Detection> dets) {
  std::string out;
  for (const Detection& d : dets) out += format_detection_line(d) + '\n';
  return out;
}

std::vector<Detection> parse_detections(std::string_view text,
                                        std::span<const std::string> class_names) {
  std::vector<Detection> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    Detection d;
    std::string extra;
    if (!(fields >> d.class_name)) continue;  // blank
    if (!(fields >> d.confidence >> d.box.x_min >> d.box.y_min >> d.box.x_max >> d.box.y_max) ||
        (fields >> extra)) {
      throw ParseError(line_no, "expected 'class_name confidence x_min y_min x_max y_max'");
    }
    if (d.confidence < 0 || d.confidence > 1) {
      throw RangeError(line_no, fmt::format("confidence {} outside [0, 1]", d.confidence));
    }
    if (!d.box.valid()) throw RangeError(line_no, "inverted box corners");
    d.class_id = -1;
    for (std::size_t c = 0; c < class_names.size(); ++c) {
      if (class_names[c] == d.class_name) d.class_id = static_cast<int>(c);
    }
    if (!class_names.empty() && d.class_id < 0) {
      throw RangeError(line_no, fmt::format("unknown class '{}'", d.class_name));
    }
    d.objectness = d.confidence;
    d.class_score = 1.0;
    out.push_back(std::move(d));
  }
  return out;
}

nlohmann::json detections_to_json(std::span<const Detection> dets) {
  nlohmann::json out = nlohmann::json::array();
  for (const Detection& d : dets) {
    out.push_back({{"class_id", d.class_id},
                   {"class_name", d.class_name},
                   {"confidence", d.confidence},
                   {"objectness", d.objectness},
                   {"class_score", d.class_score},
                   {"box", {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max}}});
  }
  return out;
}

std::array<Tensor, 3> encode_truth_heads(std::span<const TruthLabel> labels, const AnchorSet& anchors,
                                         int num_classes, int input_n) {
  constexpr double kHot = 20.0;
  constexpr double kCold = -20.0;
  const int channels = head_channels(num_classes);
  const int slot_width = 5 + num_classes;
  require_stride_multiple(input_n);

  std::array<Tensor, 3> heads;
  for (int s = 0; s < 3; ++s) {
    const int g = input_n / (8 << s);
    heads[s] = Tensor(g, g, channels, 0.0);
    for (int row = 0; row < g; ++row) {
      for (int col = 0; col < g; ++col) {
        for (int slot = 0; slot < 3; ++slot) {
          for (int k = 4; k < slot_width; ++k) heads[s].at(row, col, slot * slot_width + k) = kCold;
        }
      }
    }
  }

  for (const TruthLabel& label : labels) {
    if (label.class_id < 0 || label.class_id >= num_classes) {
      throw RangeError(0, fmt::format("class id {} outside [0, {})", label.class_id, num_classes));
    }
    const double w = label.box.w * input_n;
    const double h = label.box.h * input_n;
    // Rank all nine anchors by shape overlap with the object.
    std::array<int, 9> rank;
    std::iota(rank.begin(), rank.end(), 0);
    const auto shape_iou = [&](int a) {
      const double inter = std::min(w, anchors[a].p_w) * std::min(h, anchors[a].p_h);
      return inter / (w * h + anchors[a].p_w * anchors[a].p_h - inter);
    };
    std::stable_sort(rank.begin(), rank.end(),
                     [&](int a, int b) { return shape_iou(a) > shape_iou(b); });

    bool placed = false;
    for (int a : rank) {
      const int s = a / 3;
      const int slot = a % 3;
      Tensor& head = heads[s];
      const int g = head.height();
      const Cell cell = responsible_cell(label.box, g);
      const int base = slot * slot_width;
      if (head.at(cell.row, cell.col, base + 4) > 0) continue;  // taken
      const auto logit = [](double p) {
        p = std::clamp(p, 1e-9, 1.0 - 1e-9);
        return std::log(p / (1.0 - p));
      };
      head.at(cell.row, cell.col, base + 0) = logit(label.box.cx * g - cell.col);
      head.at(cell.row, cell.col, base + 1) = logit(label.box.cy * g - cell.row);
      head.at(cell.row, cell.col, base + 2) = std::log(w / anchors[a].p_w);
      head.at(cell.row, cell.col, base + 3) = std::log(h / anchors[a].p_h);
      head.at(cell.row, cell.col, base + 4) = kHot;
      head.at(cell.row, cell.col, base + 5 + label.class_id) = kHot;
      placed = true;
      break;
    }
    if (!placed) {
      throw ShapeError("encode_truth_heads: every anchor slot at this object's cells is taken");
    }
  }
  return heads;
}

}  // namespace yolodesk
