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

// Reference implementations used only by tests. Each is written directly
// from the defining formula, sharing no code with the library.
#ifndef YOLODESK_TESTS_ORACLES_H_
#define YOLODESK_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "yolodesk/augment.h"
#include "yolodesk/eval.h"
#include "yolodesk/layers.h"
#include "yolodesk/postprocess.h"
#include "yolodesk/synth.h"
#include "yolodesk/tensor.h"

namespace oracle {

using yolodesk::Tensor;

inline long double mish(long double x) { return x * std::tanh(std::log1p(std::exp(x))); }

inline double apply_activation(yolodesk::Activation a, double v) {
  switch (a) {
    case yolodesk::Activation::kLinear: return v;
    case yolodesk::Activation::kLeaky: return v > 0 ? v : 0.1 * v;
    case yolodesk::Activation::kMish: return static_cast<double>(mish(v));
  }
  return v;
}

// Zero-pads into a bigger buffer, then slides the kernel without bounds checks.
inline Tensor conv2d(const Tensor& in, const yolodesk::ConvParams& p) {
  const int k = p.kernel;
  const int cin = in.channels();
  const int ph = in.height() + 2 * p.pad;
  const int pw = in.width() + 2 * p.pad;
  std::vector<double> padded(static_cast<std::size_t>(ph) * pw * cin, 0.0);
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x)
      for (int c = 0; c < cin; ++c)
        padded[(static_cast<std::size_t>(y + p.pad) * pw + (x + p.pad)) * cin + c] = in.at(y, x, c);
  const int oh = (ph - k) / p.stride + 1;
  const int ow = (pw - k) / p.stride + 1;
  Tensor out(oh, ow, p.filters);
  for (int f = 0; f < p.filters; ++f)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        double acc = p.bias[f];
        for (int c = 0; c < cin; ++c)
          for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
              const int y = oy * p.stride + ky;
              const int x = ox * p.stride + kx;
              acc += p.weights[((static_cast<std::size_t>(f) * cin + c) * k + ky) * k + kx] *
                     padded[(static_cast<std::size_t>(y) * pw + x) * cin + c];
            }
        out.at(oy, ox, f) = apply_activation(p.activation, acc);
      }
  return out;
}

inline Tensor max_pool(const Tensor& in, int k, int stride, int pad) {
  const int oh = (in.height() + 2 * pad - k) / stride + 1;
  const int ow = (in.width() + 2 * pad - k) / stride + 1;
  Tensor out(oh, ow, in.channels());
  for (int c = 0; c < in.channels(); ++c)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        double best = -std::numeric_limits<double>::infinity();
        for (int ky = 0; ky < k; ++ky)
          for (int kx = 0; kx < k; ++kx) {
            const int y = oy * stride - pad + ky;
            const int x = ox * stride - pad + kx;
            if (y < 0 || x < 0 || y >= in.height() || x >= in.width()) continue;
            best = std::max(best, in.at(y, x, c));
          }
        out.at(oy, ox, c) = best;
      }
  return out;
}

inline Tensor channels(const Tensor& in, int begin, int end) {
  Tensor out(in.height(), in.width(), end - begin);
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x)
      for (int c = begin; c < end; ++c) out.at(y, x, c - begin) = in.at(y, x, c);
  return out;
}

inline Tensor stack(const Tensor& a, const Tensor& b) {
  Tensor out(a.height(), a.width(), a.channels() + b.channels());
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      for (int c = 0; c < a.channels(); ++c) out.at(y, x, c) = a.at(y, x, c);
      for (int c = 0; c < b.channels(); ++c) out.at(y, x, a.channels() + c) = b.at(y, x, c);
    }
  return out;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) return std::numeric_limits<double>::infinity();
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  return worst;
}

inline yolodesk::ConvParams random_conv(std::mt19937_64& rng, int in_c, int filters, int k, int stride,
                                        int pad, yolodesk::Activation act) {
  std::uniform_real_distribution<double> u(-1, 1);
  yolodesk::ConvParams p;
  p.filters = filters;
  p.kernel = k;
  p.stride = stride;
  p.pad = pad;
  p.activation = act;
  p.weights.resize(static_cast<std::size_t>(filters) * in_c * k * k);
  for (double& w : p.weights) w = u(rng);
  p.bias.resize(filters);
  for (double& b : p.bias) b = u(rng);
  return p;
}

inline Tensor random_tensor(std::mt19937_64& rng, int h, int w, int c, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(h, w, c);
  for (double& v : t.values()) v = u(rng);
  return t;
}

inline double box_iou(const yolodesk::BoxCorner& a, const yolodesk::BoxCorner& b) {
  const double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = ix * iy;
  const double u = (a.x_max - a.x_min) * (a.y_max - a.y_min) + (b.x_max - b.x_min) * (b.y_max - b.y_min) - inter;
  return u > 0 ? inter / u : 0.0;
}

// Rasterized overlap for integer boxes: counts unit pixels.
inline double pixel_iou(int ax0, int ay0, int ax1, int ay1, int bx0, int by0, int bx1, int by1) {
  long inter = 0, uni = 0;
  for (int y = std::min(ay0, by0); y < std::max(ay1, by1); ++y)
    for (int x = std::min(ax0, bx0); x < std::max(ax1, bx1); ++x) {
      const bool in_a = x >= ax0 && x < ax1 && y >= ay0 && y < ay1;
      const bool in_b = x >= bx0 && x < bx1 && y >= by0 && y < by1;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  return uni ? static_cast<double>(inter) / uni : 0.0;
}

struct Decoded {
  double x, y, w, h;
};

inline Decoded decode(double tx, double ty, double tw, double th, int row, int col, double pw, double ph,
                      int grid, int input) {
  const double stride = static_cast<double>(input) / grid;
  return {(1.0 / (1.0 + std::exp(-tx)) + col) * stride, (1.0 / (1.0 + std::exp(-ty)) + row) * stride,
          pw * std::exp(tw), ph * std::exp(th)};
}

// The pop-max loop: discard low scores, then take the current best and drop
// everything overlapping it, until the pool is empty.
inline std::vector<yolodesk::Detection> nms(std::vector<yolodesk::Detection> pool, double lambda_p,
                                            double lambda_iou) {
  std::vector<yolodesk::Detection> kept;
  std::erase_if(pool, [&](const yolodesk::Detection& d) { return d.confidence < lambda_p; });
  while (!pool.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i)
      if (pool[i].confidence > pool[best].confidence) best = i;
    const yolodesk::Detection top = pool[best];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
    kept.push_back(top);
    std::vector<yolodesk::Detection> rest;
    for (const auto& d : pool)
      if (box_iou(d.box, top.box) < lambda_iou) rest.push_back(d);
    pool = std::move(rest);
  }
  return kept;
}

// Greedy matching by repeated selection: every step takes the highest
// confidence detection not yet visited and the highest-IoU free truth.
inline std::vector<int> match(const std::vector<yolodesk::Detection>& dets,
                              const std::vector<yolodesk::GroundTruth>& gts, double thr) {
  std::vector<int> assigned(dets.size(), -1);
  std::vector<bool> visited(dets.size(), false), taken(gts.size(), false);
  for (std::size_t step = 0; step < dets.size(); ++step) {
    int d = -1;
    for (std::size_t i = 0; i < dets.size(); ++i)
      if (!visited[i] && (d < 0 || dets[i].confidence > dets[d].confidence)) d = static_cast<int>(i);
    visited[d] = true;
    int g = -1;
    double best = -1;
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (taken[j] || gts[j].class_id != dets[d].class_id) continue;
      const double v = box_iou(dets[d].box, gts[j].box);
      if (v >= thr && v > best) {
        best = v;
        g = static_cast<int>(j);
      }
    }
    if (g >= 0) {
      taken[g] = true;
      assigned[d] = g;
    }
  }
  return assigned;
}

// AP by brute force: for each cut-off rank k, count TPs among the first k
// detections directly, then take the precision envelope at each recall point
// by scanning every cut-off. Assumes distinct confidences across the dataset.
inline double average_precision(const std::vector<yolodesk::ImageEval>& images, int cls, double thr) {
  struct Hit {
    double conf;
    bool tp;
  };
  std::vector<Hit> hits;
  int positives = 0;
  for (const auto& img : images) {
    for (const auto& g : img.truths) positives += g.class_id == cls;
    const auto assigned = match(img.detections, img.truths, thr);
    for (std::size_t i = 0; i < img.detections.size(); ++i)
      if (img.detections[i].class_id == cls) hits.push_back({img.detections[i].confidence, assigned[i] >= 0});
  }
  if (positives == 0) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> prec, rec;
  for (const Hit& cut : hits) {
    int n = 0, tp = 0;
    for (const Hit& h : hits)
      if (h.conf >= cut.conf) {
        ++n;
        tp += h.tp;
      }
    prec.push_back(static_cast<double>(tp) / n);
    rec.push_back(static_cast<double>(tp) / positives);
  }
  double sum = 0;
  for (int p = 0; p <= 100; ++p) {
    const double r = p / 100.0;
    double best = 0;
    for (std::size_t i = 0; i < prec.size(); ++i)
      if (rec[i] >= r) best = std::max(best, prec[i]);
    sum += best;
  }
  return sum / 101;
}

inline double map_50_95(const std::vector<yolodesk::ImageEval>& images) {
  std::vector<int> classes;
  for (const auto& img : images)
    for (const auto& g : img.truths)
      if (std::find(classes.begin(), classes.end(), g.class_id) == classes.end()) classes.push_back(g.class_id);
  double total = 0;
  for (int t = 0; t < 10; ++t) {
    double per = 0;
    for (int c : classes) per += average_precision(images, c, (50 + 5 * t) / 100.0);
    total += per / static_cast<double>(classes.size());
  }
  return total / 10;
}

// Independent walk over a darknet cfg: own section splitter, own shape rules.
// Returns per-layer (h, w, c) and, for convolutional layers, H*W*filters.
struct CfgLayer {
  std::string kind;
  int h = 0, w = 0, c = 0;
  long long neurons = 0;
};

inline std::vector<CfgLayer> walk_cfg(const std::string& text, int* input_h = nullptr) {
  std::vector<std::pair<std::string, std::map<std::string, std::string>>> sections;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line.erase(std::remove_if(line.begin(), line.end(), [](char ch) { return ch == ' ' || ch == '\r' || ch == '\t'; }),
               line.end());
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line[0] == '[') {
      sections.push_back({line.substr(1, line.size() - 2), {}});
      continue;
    }
    const auto eq = line.find('=');
    sections.back().second[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const auto num = [](const std::map<std::string, std::string>& kv, const std::string& key, int fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stoi(it->second);
  };
  const auto list = [](const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
  };
  int h = num(sections[0].second, "height", 0), w = num(sections[0].second, "width", 0),
      c = num(sections[0].second, "channels", 3);
  if (input_h) *input_h = h;
  std::vector<CfgLayer> out;
  for (std::size_t i = 1; i < sections.size(); ++i) {
    const auto& [kind, kv] = sections[i];
    const int idx = static_cast<int>(out.size());
    CfgLayer l{kind};
    if (kind == "convolutional") {
      const int size = num(kv, "size", 1), stride = num(kv, "stride", 1);
      const int pad = num(kv, "pad", 0) ? size / 2 : 0;
      l.h = (h + 2 * pad - size) / stride + 1;
      l.w = (w + 2 * pad - size) / stride + 1;
      l.c = num(kv, "filters", 1);
      l.neurons = 1LL * l.h * l.w * l.c;
    } else if (kind == "maxpool") {
      const int size = num(kv, "size", 1), stride = num(kv, "stride", 1);
      l.h = (h + size - 1 - size) / stride + 1;
      l.w = (w + size - 1 - size) / stride + 1;
      l.c = c;
    } else if (kind == "upsample") {
      l.h = 2 * h;
      l.w = 2 * w;
      l.c = c;
    } else if (kind == "route") {
      l.c = 0;
      for (int ref : list(kv.at("layers"))) {
        const CfgLayer& src = out[ref < 0 ? idx + ref : ref];
        l.h = src.h;
        l.w = src.w;
        l.c += src.c;
      }
    } else {
      l.h = h;
      l.w = w;
      l.c = c;
    }
    h = l.h;
    w = l.w;
    c = l.c;
    out.push_back(l);
  }
  return out;
}

// Object-id raster of a rendered scene: pixel value r = index + 1 wherever the
// scene shows that object's colour inside its own bounds, 0 elsewhere.
// Requires non-overlapping objects.
inline yolodesk::Image id_raster(const yolodesk::Scene& scene) {
  const yolodesk::Image& img = scene.sample.image;
  yolodesk::Image out(img.width(), img.height());
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& o = scene.objects[i];
    const yolodesk::Rgb color = yolodesk::class_style(o.class_id).color;
    for (int y = o.y0; y < o.y1; ++y) {
      for (int x = o.x0; x < o.x1; ++x) {
        if (img.get(x, y) == color) out.set(x, y, {static_cast<std::uint8_t>(i + 1), 0, 0});
      }
    }
  }
  return out;
}

struct PixelBox {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open
  long long count = 0;
};

inline PixelBox tight_box(const yolodesk::Image& raster, int id) {
  PixelBox b{raster.width(), raster.height(), 0, 0, 0};
  for (int y = 0; y < raster.height(); ++y) {
    for (int x = 0; x < raster.width(); ++x) {
      if (raster.get(x, y).r != id) continue;
      b.x0 = std::min(b.x0, x);
      b.y0 = std::min(b.y0, y);
      b.x1 = std::max(b.x1, x + 1);
      b.y1 = std::max(b.y1, y + 1);
      ++b.count;
    }
  }
  return b;
}

// Per surviving label (class_id holds the object index), the fraction of that
// object's raster pixels whose centres fall inside the label box.
inline std::vector<double> label_coverage(const yolodesk::LabeledImage& transformed) {
  const int w = transformed.image.width(), h = transformed.image.height();
  std::vector<double> out;
  for (const auto& label : transformed.labels) {
    const double x0 = (label.box.cx - label.box.w / 2) * w, x1 = (label.box.cx + label.box.w / 2) * w;
    const double y0 = (label.box.cy - label.box.h / 2) * h, y1 = (label.box.cy + label.box.h / 2) * h;
    long long total = 0, inside = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (transformed.image.get(x, y).r != label.class_id + 1) continue;
        ++total;
        const double px = x + 0.5, py = y + 0.5;
        if (px >= x0 - 1e-9 && px <= x1 + 1e-9 && py >= y0 - 1e-9 && py <= y1 + 1e-9) ++inside;
      }
    }
    out.push_back(total == 0 ? 1.0 : double(inside) / double(total));
  }
  return out;
}

// Destination pixel (x, y) of a quarter turn clockwise on an n x n raster
// comes from source (y, n - 1 - x).
inline yolodesk::Image quarter_turn_cw(const yolodesk::Image& in) {
  const int n = in.width();
  yolodesk::Image out(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) out.set(x, y, in.get(y, n - 1 - x));
  }
  return out;
}

inline yolodesk::Image mirror(const yolodesk::Image& in, bool horizontal) {
  yolodesk::Image out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      out.set(x, y, horizontal ? in.get(in.width() - 1 - x, y) : in.get(x, in.height() - 1 - y));
    }
  }
  return out;
}

}  // namespace oracle

#endif  // YOLODESK_TESTS_ORACLES_H_
