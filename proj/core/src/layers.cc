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

#include "yolodesk/layers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "yolodesk/error.h"

namespace yolodesk {

Activation parse_activation(std::string_view name) {
  if (name == "linear") return Activation::kLinear;
  if (name == "leaky") return Activation::kLeaky;
  if (name == "mish") return Activation::kMish;
  throw ParseError(0, fmt::format("unsupported activation '{}'", name));
}

std::string_view activation_name(Activation act) {
  switch (act) {
    case Activation::kLinear: return "linear";
    case Activation::kLeaky: return "leaky";
    case Activation::kMish: return "mish";
  }
  return "linear";
}

double mish(double x) {
  const double softplus = x > 20.0 ? x : std::log1p(std::exp(x));
  return x * std::tanh(softplus);
}

double leaky_relu(double x, double slope) { return x >= 0.0 ? x : slope * x; }

double activate(Activation act, double x) {
  switch (act) {
    case Activation::kLinear: return x;
    case Activation::kLeaky: return leaky_relu(x);
    case Activation::kMish: return mish(x);
  }
  return x;
}

int ConvParams::in_channels() const {
  if (filters <= 0 || kernel <= 0 || stride <= 0 || pad < 0) {
    throw ShapeError(fmt::format("invalid conv hyper-parameters filters={} kernel={} stride={} pad={}",
                                 filters, kernel, stride, pad));
  }
  const std::size_t per_channel = static_cast<std::size_t>(filters) * kernel * kernel;
  if (weights.empty() || weights.size() % per_channel != 0) {
    throw ShapeError(fmt::format("conv weight count {} is not a multiple of filters*kernel*kernel = {}",
                                 weights.size(), per_channel));
  }
  return static_cast<int>(weights.size() / per_channel);
}

int window_output_extent(int extent, int kernel, int stride, int pad) {
  if (kernel <= 0 || stride <= 0 || pad < 0) {
    throw ShapeError(fmt::format("invalid window kernel={} stride={} pad={}", kernel, stride, pad));
  }
  const int span = extent + 2 * pad - kernel;
  if (span < 0) {
    throw ShapeError(fmt::format("window of size {} does not fit extent {} with pad {}", kernel,
                                 extent, pad));
  }
  return span / stride + 1;
}

Tensor conv2d(const Tensor& input, const ConvParams& params) {
  const int in_c = params.in_channels();
  if (in_c != input.channels()) {
    throw ShapeError(fmt::format("conv2d: input has {} channels but weights expect {}",
                                 input.channels(), in_c));
  }
  if (params.bias.size() != static_cast<std::size_t>(params.filters)) {
    throw ShapeError(fmt::format("conv2d: bias has {} entries for {} filters", params.bias.size(),
                                 params.filters));
  }
  const int k = params.kernel;
  const int out_h = window_output_extent(input.height(), k, params.stride, params.pad);
  const int out_w = window_output_extent(input.width(), k, params.stride, params.pad);
  Tensor out(out_h, out_w, params.filters);

  const std::size_t filter_stride = static_cast<std::size_t>(in_c) * k * k;
  for (int oy = 0; oy < out_h; ++oy) {
    const int y0 = oy * params.stride - params.pad;
    const int ky_begin = std::max(0, -y0);
    const int ky_end = std::min(k, input.height() - y0);
    for (int ox = 0; ox < out_w; ++ox) {
      const int x0 = ox * params.stride - params.pad;
      const int kx_begin = std::max(0, -x0);
      const int kx_end = std::min(k, input.width() - x0);
      for (int f = 0; f < params.filters; ++f) {
        const double* w = params.weights.data() + f * filter_stride;
        double acc = params.bias[f];
        for (int ky = ky_begin; ky < ky_end; ++ky) {
          for (int kx = kx_begin; kx < kx_end; ++kx) {
            const auto px = input.pixel(y0 + ky, x0 + kx);
            for (int c = 0; c < in_c; ++c) {
              acc += w[(static_cast<std::size_t>(c) * k + ky) * k + kx] * px[c];
            }
          }
        }
        out.at(oy, ox, f) = activate(params.activation, acc);
      }
    }
  }
  return out;
}

Tensor residual_block(const Tensor& input, const ConvParams& conv1, const ConvParams& conv2) {
  if (conv1.kernel != 1) {
    throw ShapeError(fmt::format("residual_block: first conv must be 1x1, got {}x{}", conv1.kernel,
                                 conv1.kernel));
  }
  if (conv2.kernel != 3 || conv2.pad != 1 || conv2.stride != 1) {
    throw ShapeError("residual_block: second conv must be 3x3, stride 1, pad 1");
  }
  Tensor out = conv2d(conv2d(input, conv1), conv2);
  if (!out.same_shape(input)) {
    throw ShapeError(fmt::format("residual_block: branch output {}x{}x{} does not match input {}x{}x{}",
                                 out.height(), out.width(), out.channels(), input.height(),
                                 input.width(), input.channels()));
  }
  auto acc = out.values();
  auto skip = input.values();
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += skip[i];
  return out;
}

Tensor slice_channels(const Tensor& input, int begin, int end) {
  if (begin < 0 || end > input.channels() || begin > end) {
    throw ShapeError(fmt::format("channel slice [{}, {}) out of range for {} channels", begin, end,
                                 input.channels()));
  }
  Tensor out(input.height(), input.width(), end - begin);
  auto dst = out.values().begin();
  for (int y = 0; y < input.height(); ++y) {
    for (int x = 0; x < input.width(); ++x) {
      const auto src = input.pixel(y, x);
      dst = std::copy(src.begin() + begin, src.begin() + end, dst);
    }
  }
  return out;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw ShapeError(fmt::format("concat_channels: spatial mismatch {}x{} vs {}x{}", a.height(),
                                 a.width(), b.height(), b.width()));
  }
  Tensor out(a.height(), a.width(), a.channels() + b.channels());
  auto dst = out.values().begin();
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      const auto pa = a.pixel(y, x);
      const auto pb = b.pixel(y, x);
      dst = std::copy(pa.begin(), pa.end(), dst);
      dst = std::copy(pb.begin(), pb.end(), dst);
    }
  }
  return out;
}

Tensor csp_block(const Tensor& input, SplitFraction split, std::span<const ConvParams> branch,
                 const ConvParams& transition) {
  if (split.numerator <= 0 || split.numerator >= split.denominator) {
    throw ShapeError(fmt::format("csp_block: invalid split fraction {}/{}", split.numerator,
                                 split.denominator));
  }
  const long scaled = static_cast<long>(input.channels()) * split.numerator;
  if (scaled % split.denominator != 0) {
    throw ShapeError(fmt::format("csp_block: {} channels cannot be split by {}/{}",
                                 input.channels(), split.numerator, split.denominator));
  }
  const int keep = static_cast<int>(scaled / split.denominator);

  Tensor passthrough = slice_channels(input, 0, keep);
  Tensor work = slice_channels(input, keep, input.channels());
  for (const ConvParams& conv : branch) work = conv2d(work, conv);
  if (work.height() != input.height() || work.width() != input.width()) {
    throw ShapeError(fmt::format("csp_block: branch changed spatial shape to {}x{}", work.height(),
                                 work.width()));
  }
  return conv2d(concat_channels(passthrough, work), transition);
}

Tensor max_pool(const Tensor& input, int kernel, int stride, int pad) {
  const int out_h = window_output_extent(input.height(), kernel, stride, pad);
  const int out_w = window_output_extent(input.width(), kernel, stride, pad);
  Tensor out(out_h, out_w, input.channels(), -std::numeric_limits<double>::infinity());
  for (int oy = 0; oy < out_h; ++oy) {
    const int y0 = oy * stride - pad;
    const int y_begin = std::max(0, y0);
    const int y_end = std::min(input.height(), y0 + kernel);
    for (int ox = 0; ox < out_w; ++ox) {
      const int x0 = ox * stride - pad;
      const int x_begin = std::max(0, x0);
      const int x_end = std::min(input.width(), x0 + kernel);
      if (y_begin >= y_end || x_begin >= x_end) {
        throw ShapeError(fmt::format("max_pool: window at ({}, {}) covers only padding", oy, ox));
      }
      for (int y = y_begin; y < y_end; ++y) {
        for (int x = x_begin; x < x_end; ++x) {
          const auto px = input.pixel(y, x);
          for (int c = 0; c < input.channels(); ++c) {
            double& best = out.at(oy, ox, c);
            best = std::max(best, px[c]);
          }
        }
      }
    }
  }
  return out;
}

Tensor spp_block(const Tensor& input, std::span<const int> pool_sizes) {
  Tensor out = input;
  for (int size : pool_sizes) {
    if (size <= 0 || size % 2 == 0) {
      throw ShapeError(fmt::format("spp_block: pool size {} must be odd and positive", size));
    }
    out = concat_channels(out, max_pool(input, size, 1, (size - 1) / 2));
  }
  return out;
}

Tensor spp_block(const Tensor& input) {
  static constexpr int kDefaultPools[] = {5, 9, 13};
  return spp_block(input, kDefaultPools);
}

Tensor upsample2x(const Tensor& input) {
  Tensor out(input.height() * 2, input.width() * 2, input.channels());
  auto dst = out.values().begin();
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const auto src = input.pixel(y / 2, x / 2);
      dst = std::copy(src.begin(), src.end(), dst);
    }
  }
  return out;
}

}  // namespace yolodesk
