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

#ifndef YOLODESK_NETDEF_H_
#define YOLODESK_NETDEF_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace yolodesk {

enum class LayerKind { kNet, kConvolutional, kShortcut, kRoute, kMaxpool, kUpsample, kYolo, kOther };

struct Shape {
  int height = 0;
  int width = 0;
  int channels = 0;

  std::int64_t volume() const { return std::int64_t{height} * width * channels; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

// One `[section]` of a darknet cfg. Keys are lower-cased and unique; values
// are kept as trimmed text and converted on access.
struct LayerSpec {
  LayerKind kind = LayerKind::kOther;
  std::string name;  // section name as it appears, lower-cased
  std::vector<std::pair<std::string, std::string>> attributes;
  int source_line = 0;

  const std::string* find(std::string_view key) const;
  bool has(std::string_view key) const { return find(key) != nullptr; }
  int get_int(std::string_view key, int fallback) const;
  int require_int(std::string_view key) const;
  double get_real(std::string_view key, double fallback) const;
  std::vector<int> get_int_list(std::string_view key) const;
  std::string get_string(std::string_view key, std::string_view fallback) const;

  // Structural equality; source lines are not compared.
  bool same_as(const LayerSpec& other) const {
    return kind == other.kind && name == other.name && attributes == other.attributes;
  }
};

// Parsed network. `layers` excludes the [net] section, so indices match the
// darknet layer numbering used by route/shortcut references. `shapes` is
// empty until propagate_shapes() runs; an entry stays empty only for an
// unknown layer kind that no later layer consumes.
struct NetGraph {
  LayerSpec net;
  std::vector<LayerSpec> layers;
  std::vector<std::optional<Shape>> shapes;
  Shape input;

  bool shapes_resolved() const { return shapes.size() == layers.size(); }
  // Shape fed into `index`: the net input for layer 0, else the previous layer's output.
  std::optional<Shape> input_shape_of(std::size_t index) const;
  bool same_as(const NetGraph& other) const;
};

LayerKind layer_kind_from_name(std::string_view section);

// Accepts LF or CRLF text: `[section]` headers, `key=value` lines, full-line
// or trailing `#`/`;` comments. Throws ParseError carrying the line number.
NetGraph parse_cfg(std::string_view text);

// Canonical text: one `key=value` per line, a blank line between sections.
std::string serialize_cfg(const NetGraph& graph);

// Returns a copy with `shapes` filled. Throws ShapeError on the first layer
// whose shape cannot be derived. Idempotent.
NetGraph propagate_shapes(const NetGraph& graph);

// Overrides the [net] width and height, as `netinfo --input N` does.
NetGraph with_input_size(const NetGraph& graph, int input_n);

struct LayerCensus {
  int index = 0;
  std::string kind;
  Shape out_shape;
  std::int64_t neurons = 0;  // H*W*filters for convolutional layers, else 0
  std::int64_t params = 0;
};

struct NetCensus {
  int conv_layer_count = 0;
  std::int64_t total_parameters = 0;
  std::int64_t input_neurons = 0;
  std::int64_t hidden_neurons = 0;
  std::vector<LayerCensus> per_layer;
};

NetCensus census(const NetGraph& graph);
nlohmann::json census_to_json(const NetGraph& graph, const NetCensus& c);
std::string census_table(const NetGraph& graph, const NetCensus& c);

// Output grids that feed each [yolo] layer, in file order.
std::vector<Shape> yolo_input_shapes(const NetGraph& graph);

// Channel count of a detection head: three anchors, each carrying four box
// terms, one objectness and one score per class.
int head_channels(int num_classes);

// (N/8)^2 + (N/16)^2 + (N/32)^2.
std::int64_t total_grid_cells(int input_n);

// Throws ShapeError unless input_n is a positive multiple of 32.
void require_stride_multiple(int input_n);

}  // namespace yolodesk

#endif  // YOLODESK_NETDEF_H_
