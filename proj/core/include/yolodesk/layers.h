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

#ifndef YOLODESK_LAYERS_H_
#define YOLODESK_LAYERS_H_

#include <span>
#include <string_view>
#include <vector>

#include "yolodesk/tensor.h"

namespace yolodesk {

enum class Activation { kLinear, kLeaky, kMish };

Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation act);

// x * tanh(softplus(x)). Softplus is taken as x itself above 20, where
// log1p(exp(x)) and x agree to double precision.
double mish(double x);
double leaky_relu(double x, double slope = 0.1);
double activate(Activation act, double x);

struct ConvParams {
  int filters = 1;
  int kernel = 1;
  int stride = 1;
  int pad = 0;  // per side
  std::vector<double> weights;  // [filter][in_channel][ky][kx]
  std::vector<double> bias;     // [filter]
  Activation activation = Activation::kLinear;

  // Derived from the weight count; throws ShapeError when the weight count is
  // not a whole multiple of filters * kernel * kernel.
  int in_channels() const;
};

// Square window arithmetic shared by convolution and pooling.
int window_output_extent(int extent, int kernel, int stride, int pad);

Tensor conv2d(const Tensor& input, const ConvParams& params);

// F(x) + x with F = conv2(conv1(x)); conv1 must be 1x1 and conv2 3x3 with
// pad 1 so that the residual branch preserves the input shape.
Tensor residual_block(const Tensor& input, const ConvParams& conv1, const ConvParams& conv2);

struct SplitFraction {
  int numerator = 1;
  int denominator = 2;
};

// Cross-stage partial block. The first C * fraction channels pass through
// untouched, the rest run through `branch` in order; the two parts are
// concatenated [passthrough | branch] and fed to `transition`. The fraction
// must lie strictly between 0 and 1.
Tensor csp_block(const Tensor& input, SplitFraction split, std::span<const ConvParams> branch,
                 const ConvParams& transition);

// Channel-wise max over square windows. Padding cells never win.
Tensor max_pool(const Tensor& input, int kernel, int stride, int pad);

// Concatenation of the input with a stride-1, shape-preserving max pool per
// entry of `pool_sizes`, in that order.
Tensor spp_block(const Tensor& input, std::span<const int> pool_sizes);
Tensor spp_block(const Tensor& input);

Tensor concat_channels(const Tensor& a, const Tensor& b);
Tensor slice_channels(const Tensor& input, int begin, int end);
Tensor upsample2x(const Tensor& input);

}  // namespace yolodesk

#endif  // YOLODESK_LAYERS_H_
