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

#include "yolodesk/netdef.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>

#include <fmt/format.h>

#include "yolodesk/error.h"

namespace yolodesk {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view strip_comment(std::string_view line) {
  const auto cut = line.find_first_of("#;");
  return cut == std::string_view::npos ? line : line.substr(0, cut);
}

int parse_int_token(std::string_view token, const LayerSpec& layer, std::string_view key) {
  token = trim(token);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(layer.source_line,
                     fmt::format("[{}] {}: '{}' is not an integer", layer.name, key, token));
  }
  return value;
}

std::string_view kind_label(LayerKind kind, const std::string& name) {
  switch (kind) {
    case LayerKind::kNet: return "net";
    case LayerKind::kConvolutional: return "conv";
    case LayerKind::kShortcut: return "shortcut";
    case LayerKind::kRoute: return "route";
    case LayerKind::kMaxpool: return "maxpool";
    case LayerKind::kUpsample: return "upsample";
    case LayerKind::kYolo: return "yolo";
    case LayerKind::kOther: return name;
  }
  return name;
}

// Resolves a route/shortcut reference relative to `index`.
std::size_t resolve_ref(int ref, std::size_t index, const LayerSpec& layer) {
  const long target = ref < 0 ? static_cast<long>(index) + ref : ref;
  if (target < 0 || target >= static_cast<long>(index)) {
    throw ShapeError(fmt::format("line {}: layer {} ({}) references layer {}, which is not an earlier layer",
                                 layer.source_line, index, layer.name, target));
  }
  return static_cast<std::size_t>(target);
}

const Shape& require_shape(const std::vector<std::optional<Shape>>& shapes, std::size_t source,
                           std::size_t index, const std::vector<LayerSpec>& layers) {
  if (!shapes[source]) {
    throw ShapeError(fmt::format("line {}: layer {} ({}) consumes layer {} of unsupported kind '{}'",
                                 layers[index].source_line, index, layers[index].name, source,
                                 layers[source].name));
  }
  return *shapes[source];
}

struct ConvGeometry {
  int filters, size, stride, padding, groups;
};

ConvGeometry conv_geometry(const LayerSpec& layer) {
  ConvGeometry g{};
  g.filters = layer.get_int("filters", 1);
  g.size = layer.get_int("size", 1);
  g.stride = layer.get_int("stride", 1);
  g.groups = layer.get_int("groups", 1);
  const int pad_flag = layer.get_int("pad", 0);
  g.padding = layer.has("padding") ? layer.get_int("padding", 0) : (pad_flag ? g.size / 2 : 0);
  if (g.filters <= 0 || g.size <= 0 || g.stride <= 0 || g.groups <= 0 || g.padding < 0) {
    throw ShapeError(fmt::format("line {}: invalid convolutional parameters", layer.source_line));
  }
  return g;
}

int window_extent(int extent, int size, int stride, int total_padding, const LayerSpec& layer,
                  std::size_t index) {
  const int span = extent + total_padding - size;
  if (span < 0) {
    throw ShapeError(fmt::format("line {}: layer {} ({}) window {} does not fit extent {}",
                                 layer.source_line, index, layer.name, size, extent));
  }
  return span / stride + 1;
}

}  // namespace

const std::string* LayerSpec::find(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

int LayerSpec::get_int(std::string_view key, int fallback) const {
  const std::string* v = find(key);
  return v ? parse_int_token(*v, *this, key) : fallback;
}

int LayerSpec::require_int(std::string_view key) const {
  const std::string* v = find(key);
  if (!v) throw ParseError(source_line, fmt::format("[{}] is missing '{}'", name, key));
  return parse_int_token(*v, *this, key);
}

double LayerSpec::get_real(std::string_view key, double fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  const std::string text(trim(*v));
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ParseError(source_line, fmt::format("[{}] {}: '{}' is not a number", name, key, text));
  }
  return value;
}

std::vector<int> LayerSpec::get_int_list(std::string_view key) const {
  std::vector<int> out;
  const std::string* v = find(key);
  if (!v) return out;
  std::string_view rest = *v;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view token = trim(rest.substr(0, comma));
    if (!token.empty()) out.push_back(parse_int_token(token, *this, key));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::string LayerSpec::get_string(std::string_view key, std::string_view fallback) const {
  const std::string* v = find(key);
  return v ? *v : std::string(fallback);
}

std::optional<Shape> NetGraph::input_shape_of(std::size_t index) const {
  if (index == 0) return input;
  if (index > shapes.size()) return std::nullopt;
  return shapes[index - 1];
}

bool NetGraph::same_as(const NetGraph& other) const {
  if (!net.same_as(other.net) || layers.size() != other.layers.size()) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (!layers[i].same_as(other.layers[i])) return false;
  }
  return input == other.input && shapes == other.shapes;
}

LayerKind layer_kind_from_name(std::string_view section) {
  if (section == "net" || section == "network") return LayerKind::kNet;
  if (section == "convolutional" || section == "conv") return LayerKind::kConvolutional;
  if (section == "shortcut") return LayerKind::kShortcut;
  if (section == "route") return LayerKind::kRoute;
  if (section == "maxpool" || section == "max") return LayerKind::kMaxpool;
  if (section == "upsample") return LayerKind::kUpsample;
  if (section == "yolo") return LayerKind::kYolo;
  return LayerKind::kOther;
}

NetGraph parse_cfg(std::string_view text) {
  std::vector<LayerSpec> sections;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    line = trim(strip_comment(line));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ParseError(line_no, fmt::format("malformed section header '{}'", line));
      }
      LayerSpec spec;
      spec.name = lower(trim(line.substr(1, line.size() - 2)));
      spec.kind = layer_kind_from_name(spec.name);
      spec.source_line = line_no;
      sections.push_back(std::move(spec));
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, fmt::format("expected key=value, got '{}'", line));
    }
    if (sections.empty()) {
      throw ParseError(line_no, "key=value line before any [section] header");
    }
    std::string key = lower(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError(line_no, "empty key");
    LayerSpec& current = sections.back();
    if (current.has(key)) {
      throw ParseError(line_no, fmt::format("duplicate key '{}' in [{}]", key, current.name));
    }
    current.attributes.emplace_back(std::move(key), std::string(trim(line.substr(eq + 1))));
  }

  if (sections.empty() || sections.front().kind != LayerKind::kNet) {
    throw ParseError(sections.empty() ? 1 : sections.front().source_line,
                     "cfg must start with a [net] section");
  }
  NetGraph graph;
  graph.net = std::move(sections.front());
  for (std::size_t i = 1; i < sections.size(); ++i) {
    if (sections[i].kind == LayerKind::kNet) {
      throw ParseError(sections[i].source_line, "[net] may appear only once");
    }
    graph.layers.push_back(std::move(sections[i]));
  }
  graph.input.width = graph.net.require_int("width");
  graph.input.height = graph.net.require_int("height");
  graph.input.channels = graph.net.get_int("channels", 3);
  if (graph.input.width <= 0 || graph.input.height <= 0 || graph.input.channels <= 0) {
    throw RangeError(graph.net.source_line, "[net] width, height and channels must be positive");
  }
  return graph;
}

std::string serialize_cfg(const NetGraph& graph) {
  std::string out;
  const auto emit = [&out](const LayerSpec& layer) {
    if (!out.empty()) out += '\n';
    out += '[' + layer.name + "]\n";
    for (const auto& [k, v] : layer.attributes) out += k + '=' + v + '\n';
  };
  emit(graph.net);
  for (const LayerSpec& layer : graph.layers) emit(layer);
  return out;
}

void require_stride_multiple(int input_n) {
  if (input_n <= 0 || input_n % 32 != 0) {
    throw ShapeError(fmt::format("input {} not multiple of 32", input_n));
  }
}

NetGraph propagate_shapes(const NetGraph& graph) {
  require_stride_multiple(graph.input.width);
  require_stride_multiple(graph.input.height);

  NetGraph out = graph;
  out.shapes.assign(graph.layers.size(), std::nullopt);
  const auto& layers = out.layers;
  auto& shapes = out.shapes;

  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& layer = layers[i];
    const auto previous = [&]() -> Shape {
      if (i == 0) return out.input;
      return require_shape(shapes, i - 1, i, layers);
    };

    switch (layer.kind) {
      case LayerKind::kConvolutional: {
        const Shape in = previous();
        const ConvGeometry g = conv_geometry(layer);
        if (in.channels % g.groups != 0) {
          throw ShapeError(fmt::format("line {}: layer {} has {} input channels, not divisible by groups={}",
                                       layer.source_line, i, in.channels, g.groups));
        }
        shapes[i] = Shape{window_extent(in.height, g.size, g.stride, 2 * g.padding, layer, i),
                          window_extent(in.width, g.size, g.stride, 2 * g.padding, layer, i),
                          g.filters};
        break;
      }
      case LayerKind::kMaxpool: {
        const Shape in = previous();
        const int stride = layer.get_int("stride", 1);
        const int size = layer.get_int("size", stride);
        const int padding = layer.get_int("padding", size - 1);
        if (stride <= 0 || size <= 0 || padding < 0) {
          throw ShapeError(fmt::format("line {}: invalid maxpool parameters", layer.source_line));
        }
        shapes[i] = Shape{window_extent(in.height, size, stride, padding, layer, i),
                          window_extent(in.width, size, stride, padding, layer, i), in.channels};
        break;
      }
      case LayerKind::kUpsample: {
        const Shape in = previous();
        const int stride = layer.get_int("stride", 2);
        if (stride <= 0) {
          throw ShapeError(fmt::format("line {}: upsample stride must be positive", layer.source_line));
        }
        shapes[i] = Shape{in.height * stride, in.width * stride, in.channels};
        break;
      }
      case LayerKind::kShortcut: {
        const Shape in = previous();
        const auto refs = layer.get_int_list("from");
        if (refs.empty()) throw ParseError(layer.source_line, "[shortcut] is missing 'from'");
        for (int ref : refs) {
          const std::size_t src = resolve_ref(ref, i, layer);
          const Shape& other = require_shape(shapes, src, i, layers);
          if (other != in) {
            throw ShapeError(fmt::format(
                "line {}: shortcut layer {} adds layer {} ({}x{}x{}) to {}x{}x{}: shape mismatch",
                layer.source_line, i, src, other.height, other.width, other.channels, in.height,
                in.width, in.channels));
          }
        }
        shapes[i] = in;
        break;
      }
      case LayerKind::kRoute: {
        const auto refs = layer.get_int_list("layers");
        if (refs.empty()) throw ParseError(layer.source_line, "[route] is missing 'layers'");
        const int groups = layer.get_int("groups", 1);
        const int group_id = layer.get_int("group_id", 0);
        if (groups <= 0 || group_id < 0 || group_id >= groups) {
          throw ShapeError(fmt::format("line {}: invalid route groups", layer.source_line));
        }
        Shape merged{};
        for (std::size_t r = 0; r < refs.size(); ++r) {
          const std::size_t src = resolve_ref(refs[r], i, layer);
          const Shape& part = require_shape(shapes, src, i, layers);
          if (part.channels % groups != 0) {
            throw ShapeError(fmt::format("line {}: route source {} has {} channels, not divisible by {}",
                                         layer.source_line, src, part.channels, groups));
          }
          if (r == 0) {
            merged = Shape{part.height, part.width, 0};
          } else if (part.height != merged.height || part.width != merged.width) {
            throw ShapeError(fmt::format("line {}: route layer {} joins {}x{} with {}x{}",
                                         layer.source_line, i, merged.height, merged.width,
                                         part.height, part.width));
          }
          merged.channels += part.channels / groups;
        }
        shapes[i] = merged;
        break;
      }
      case LayerKind::kYolo:
        shapes[i] = previous();
        break;
      case LayerKind::kOther:
        if (layer.name == "sam" || layer.name == "dropout" || layer.name == "scale_channels") {
          shapes[i] = previous();
        } else if (layer.name == "avgpool") {
          shapes[i] = Shape{1, 1, previous().channels};
        }
        break;
      case LayerKind::kNet:
        throw ParseError(layer.source_line, "[net] may appear only once");
    }
  }
  return out;
}

NetGraph with_input_size(const NetGraph& graph, int input_n) {
  NetGraph out = graph;
  out.shapes.clear();
  for (auto& [k, v] : out.net.attributes) {
    if (k == "width" || k == "height") v = std::to_string(input_n);
  }
  out.input.width = input_n;
  out.input.height = input_n;
  return out;
}

NetCensus census(const NetGraph& graph) {
  if (!graph.shapes_resolved()) {
    throw ShapeError("census requires propagated shapes");
  }
  NetCensus c;
  c.input_neurons = graph.input.volume();
  for (std::size_t i = 0; i < graph.layers.size(); ++i) {
    const LayerSpec& layer = graph.layers[i];
    LayerCensus row;
    row.index = static_cast<int>(i);
    row.kind = std::string(kind_label(layer.kind, layer.name));
    if (graph.shapes[i]) row.out_shape = *graph.shapes[i];
    if (layer.kind == LayerKind::kConvolutional) {
      const auto in = graph.input_shape_of(i);
      if (!in || !graph.shapes[i]) {
        throw ShapeError(fmt::format("census: layer {} has no resolved shape", i));
      }
      const ConvGeometry g = conv_geometry(layer);
      const std::int64_t weights =
          std::int64_t{g.filters} * (in->channels / g.groups) * g.size * g.size;
      const bool batch_norm = layer.get_int("batch_normalize", 0) != 0;
      row.params = weights + g.filters + (batch_norm ? 3 * std::int64_t{g.filters} : 0);
      row.neurons = row.out_shape.volume();
      ++c.conv_layer_count;
      c.hidden_neurons += row.neurons;
      c.total_parameters += row.params;
    }
    c.per_layer.push_back(std::move(row));
  }
  return c;
}

nlohmann::json census_to_json(const NetGraph& graph, const NetCensus& c) {
  nlohmann::json layers = nlohmann::json::array();
  for (const LayerCensus& row : c.per_layer) {
    layers.push_back({{"index", row.index},
                      {"kind", row.kind},
                      {"out_shape", {row.out_shape.height, row.out_shape.width, row.out_shape.channels}},
                      {"neurons", row.neurons},
                      {"params", row.params}});
  }
  return {{"input", {graph.input.height, graph.input.width, graph.input.channels}},
          {"input_neurons", c.input_neurons},
          {"conv_layer_count", c.conv_layer_count},
          {"hidden_neurons", c.hidden_neurons},
          {"total_parameters", c.total_parameters},
          {"layers", std::move(layers)}};
}

std::string census_table(const NetGraph& graph, const NetCensus& c) {
  std::string out = fmt::format("{:>5}  {:<10}  {:>16}  {:>12}  {:>12}\n", "layer", "kind",
                                "output", "neurons", "params");
  for (const LayerCensus& row : c.per_layer) {
    const std::string shape = fmt::format("{}x{}x{}", row.out_shape.height, row.out_shape.width,
                                          row.out_shape.channels);
    out += fmt::format("{:>5}  {:<10}  {:>16}  {:>12}  {:>12}\n", row.index, row.kind, shape,
                       row.neurons, row.params);
  }
  out += fmt::format("input: {}x{}x{}\n", graph.input.height, graph.input.width, graph.input.channels);
  out += fmt::format("input neurons: {}\n", c.input_neurons);
  out += fmt::format("convolutional layers: {}\n", c.conv_layer_count);
  out += fmt::format("hidden neurons: {}\n", c.hidden_neurons);
  out += fmt::format("parameters: {}\n", c.total_parameters);
  return out;
}

std::vector<Shape> yolo_input_shapes(const NetGraph& graph) {
  std::vector<Shape> out;
  for (std::size_t i = 0; i < graph.layers.size(); ++i) {
    if (graph.layers[i].kind != LayerKind::kYolo) continue;
    const auto in = graph.input_shape_of(i);
    if (!in) throw ShapeError(fmt::format("yolo layer {} has no resolved input", i));
    out.push_back(*in);
  }
  return out;
}

int head_channels(int num_classes) {
  if (num_classes < 1) {
    throw RangeError(0, fmt::format("head needs at least one class, got {}", num_classes));
  }
  return 3 * (4 + 1 + num_classes);
}

std::int64_t total_grid_cells(int input_n) {
  require_stride_multiple(input_n);
  std::int64_t total = 0;
  for (int stride : {8, 16, 32}) {
    const std::int64_t g = input_n / stride;
    total += g * g;
  }
  return total;
}

}  // namespace yolodesk
