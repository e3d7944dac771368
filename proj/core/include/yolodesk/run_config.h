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

#ifndef YOLODESK_RUN_CONFIG_H_
#define YOLODESK_RUN_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "yolodesk/augment.h"
#include "yolodesk/postprocess.h"

namespace yolodesk {

struct RunConfig {
  int input_n = 608;
  std::string classes;  // path to classes.txt; empty selects the built-in parts list
  AnchorSet anchors = default_anchors();
  DetectConfig detect;
  ExpansionPlan augment;
  std::uint64_t seed = 0;

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

// Flat `key = value` text. Blank lines and `#` comments are ignored; keys not
// present keep their defaults. Throws ParseError / RangeError with the line.
RunConfig parse_run_config(std::string_view text);
std::string format_run_config(const RunConfig& config);

// Nine `w,h` pairs separated by spaces, small to large.
AnchorSet parse_anchors(std::string_view text);

// Throws RangeError when input_n is not a positive multiple of 32, an anchor
// is not positive, or a threshold leaves [0, 1].
void validate(const RunConfig& config);

}  // namespace yolodesk

#endif  // YOLODESK_RUN_CONFIG_H_
