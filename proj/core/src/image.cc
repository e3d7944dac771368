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

#include "yolodesk/image.h"

#include <cctype>
#include <string>

#include <fmt/format.h>

#include "yolodesk/error.h"

namespace yolodesk {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Next decimal token, skipping whitespace and '#' comments.
  long next_number() {
    skip_space_and_comments();
    long value = 0;
    int digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (++digits > 9) throw FormatError("PPM header number too large");
    }
    if (digits == 0) throw FormatError("PPM header is truncated or malformed");
    return value;
  }

  // The single whitespace byte that separates maxval from the raster.
  void consume_separator() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError("PPM header must end with one whitespace byte");
    }
    ++pos_;
  }

  std::size_t position() const { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw ShapeError(fmt::format("image dimensions must be positive, got {}x{}", width, height));
  }
  bytes_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < bytes_.size(); i += 3) {
    bytes_[i] = fill.r;
    bytes_[i + 1] = fill.g;
    bytes_[i + 2] = fill.b;
  }
}

Image::Image(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), bytes_(std::move(rgb)) {
  if (width <= 0 || height <= 0) {
    throw ShapeError(fmt::format("image dimensions must be positive, got {}x{}", width, height));
  }
  if (bytes_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw ShapeError(fmt::format("{} bytes do not form a {}x{} RGB image", bytes_.size(), width, height));
  }
}

Image read_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw FormatError("bad magic: not a PNM file");
  if (bytes[1] != '6') {
    if (bytes[1] >= '1' && bytes[1] <= '7') {
      throw FormatError(fmt::format("unsupported PNM format P{}; only binary P6 is read",
                                    static_cast<char>(bytes[1])));
    }
    throw FormatError("bad magic: not a PNM file");
  }
  HeaderReader header(bytes);
  const long width = header.next_number();
  const long height = header.next_number();
  const long maxval = header.next_number();
  header.consume_separator();
  if (width <= 0 || height <= 0) throw FormatError("PPM dimensions must be positive");
  if (maxval != 255) throw FormatError(fmt::format("unsupported PPM maxval {} (need 255)", maxval));

  const std::size_t payload = static_cast<std::size_t>(width) * height * 3;
  const std::size_t start = header.position();
  if (bytes.size() - start < payload) {
    throw FormatError(fmt::format("truncated PPM payload: {} of {} bytes", bytes.size() - start, payload));
  }
  return Image(static_cast<int>(width), static_cast<int>(height),
               std::vector<std::uint8_t>(bytes.begin() + start, bytes.begin() + start + payload));
}

std::vector<std::uint8_t> write_ppm(const Image& image) {
  const std::string header = fmt::format("P6\n{} {}\n255\n", image.width(), image.height());
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.bytes().begin(), image.bytes().end());
  return out;
}

}  // namespace yolodesk
