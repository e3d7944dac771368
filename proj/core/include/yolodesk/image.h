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

#ifndef YOLODESK_IMAGE_H_
#define YOLODESK_IMAGE_H_

#include <cstdint>
#include <span>
#include <vector>

namespace yolodesk {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// 8-bit RGB raster, row-major, three bytes per pixel.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {});
  Image(int width, int height, std::vector<std::uint8_t> rgb);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0; }

  Rgb get(int x, int y) const {
    const std::size_t i = offset(x, y);
    return {bytes_[i], bytes_[i + 1], bytes_[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = offset(x, y);
    bytes_[i] = c.r;
    bytes_[i + 1] = c.g;
    bytes_[i + 2] = c.b;
  }

  std::span<const std::uint8_t> bytes() const { return bytes_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bytes_;
};

// Binary P6 with maxval 255. Header comments are accepted on read; write
// emits "P6\n<w> <h>\n255\n" followed by the payload.
Image read_ppm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_ppm(const Image& image);

}  // namespace yolodesk

#endif  // YOLODESK_IMAGE_H_
