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

#include "yolodesk/labels.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

#include <fmt/format.h>

#include "yolodesk/error.h"

namespace yolodesk {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Splits on LF, dropping a trailing CR from each line.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = eol + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_real(std::string_view token, int line_no, std::string_view what) {
  const std::string text(token);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw ParseError(line_no, fmt::format("{} '{}' is not a finite number", what, token));
  }
  return v;
}

int parse_integer(std::string_view token, int line_no, std::string_view what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line_no, fmt::format("{} '{}' is not an integer", what, token));
  }
  return v;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// RFC 4180 record splitter. Returns false at end of input.
bool next_csv_record(std::string_view text, std::size_t& pos, int& line_no,
                     std::vector<std::string>& fields) {
  fields.clear();
  if (pos >= text.size()) return false;
  ++line_no;
  const int start_line = line_no;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          field += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field += c;
      }
    } else if (c == '"') {
      if (!field.empty() || was_quoted) throw ParseError(line_no, "stray quote in CSV field");
      quoted = was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '\n') {
      break;
    } else if (c == '\r' && pos < text.size() && text[pos] == '\n') {
      // CRLF; the LF ends the record on the next iteration.
    } else {
      if (was_quoted) throw ParseError(line_no, "characters after closing quote");
      field += c;
    }
  }
  if (quoted) throw ParseError(start_line, "unterminated quoted CSV field");
  fields.push_back(std::move(field));
  return true;
}

constexpr std::string_view kCsvHeader = "filename,width,height,class,x_min,y_min,x_max,y_max";

}  // namespace

ClassRegistry::ClassRegistry(std::vector<std::string> names) : names_(std::move(names)) {
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const std::string& n = names_[i];
    if (n.empty()) throw RangeError(static_cast<int>(i) + 1, "empty class name");
    if (std::any_of(n.begin(), n.end(), is_space)) {
      throw RangeError(static_cast<int>(i) + 1, fmt::format("class name '{}' contains whitespace", n));
    }
    if (!seen.insert(n).second) {
      throw RangeError(static_cast<int>(i) + 1, fmt::format("duplicate class name '{}'", n));
    }
  }
}

int ClassRegistry::find(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

ClassRegistry parse_classes(std::string_view text) {
  auto lines = split_lines(text);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  std::vector<std::string> names;
  for (std::string_view line : lines) names.emplace_back(trim(line));
  return ClassRegistry(std::move(names));
}

std::string format_classes(const ClassRegistry& registry) {
  std::string out;
  for (const std::string& n : registry.names()) out += n + '\n';
  return out;
}

ClassRegistry default_part_registry() {
  return ClassRegistry({"bolt", "nut", "washer", "gear", "bracket", "spring", "pin", "bushing",
                        "flange", "clip", "shaft", "cap", "plate"});
}

std::vector<YoloLabel> read_yolo_labels(std::string_view text, const ClassRegistry& registry) {
  std::vector<YoloLabel> out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    const auto fields = split_fields(lines[i]);
    if (fields.empty()) continue;
    if (fields.size() != 5) {
      throw ParseError(line_no, fmt::format("expected 5 fields 'class_id cx cy w h', got {}", fields.size()));
    }
    YoloLabel label;
    label.class_id = parse_integer(fields[0], line_no, "class id");
    if (label.class_id < 0 || label.class_id >= registry.size()) {
      throw RangeError(line_no, fmt::format("class id {} outside 0..{}", label.class_id,
                                            registry.size() - 1));
    }
    const double cx = parse_real(fields[1], line_no, "cx");
    const double cy = parse_real(fields[2], line_no, "cy");
    const double w = parse_real(fields[3], line_no, "w");
    const double h = parse_real(fields[4], line_no, "h");
    for (double v : {cx, cy, w, h}) {
      if (v < 0 || v > 1) throw RangeError(line_no, fmt::format("coordinate {} outside [0, 1]", v));
    }
    if (w <= 0 || h <= 0) throw RangeError(line_no, "box width and height must be positive");
    label.box = snapped({cx, cy, w, h});
    out.push_back(label);
  }
  return out;
}

std::string write_yolo_labels(std::span<const YoloLabel> labels) {
  std::string out;
  for (const YoloLabel& l : labels) {
    out += fmt::format("{} {:.6f} {:.6f} {:.6f} {:.6f}\n", l.class_id, l.box.cx, l.box.cy, l.box.w,
                       l.box.h);
  }
  return out;
}

std::vector<CornerLabel> read_labelimg_corners(std::string_view text, int img_w, int img_h) {
  if (img_w <= 0 || img_h <= 0) {
    throw RangeError(0, fmt::format("image dimensions must be positive, got {}x{}", img_w, img_h));
  }
  constexpr double kTolerance = 1.0;
  std::vector<CornerLabel> out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    const auto fields = split_fields(lines[i]);
    if (fields.empty()) continue;
    if (fields.size() != 5) {
      throw ParseError(line_no, fmt::format("expected 'class_name x_min y_min x_max y_max', got {} fields",
                                            fields.size()));
    }
    CornerLabel label;
    label.class_name = std::string(fields[0]);
    label.box = {parse_real(fields[1], line_no, "x_min"), parse_real(fields[2], line_no, "y_min"),
                 parse_real(fields[3], line_no, "x_max"), parse_real(fields[4], line_no, "y_max")};
    if (!label.box.valid()) throw RangeError(line_no, "inverted corners (min greater than max)");
    if (label.box.x_min < -kTolerance || label.box.y_min < -kTolerance ||
        label.box.x_max > img_w + kTolerance || label.box.y_max > img_h + kTolerance) {
      throw RangeError(line_no, fmt::format("box lies outside the {}x{} image", img_w, img_h));
    }
    out.push_back(std::move(label));
  }
  return out;
}

std::vector<YoloLabel> corners_to_yolo(std::span<const CornerLabel> corners, int img_w, int img_h,
                                       const ClassRegistry& registry) {
  std::vector<YoloLabel> out;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const int id = registry.find(corners[i].class_name);
    if (id < 0) {
      throw RangeError(static_cast<int>(i) + 1,
                       fmt::format("class '{}' is not in the registry", corners[i].class_name));
    }
    const BoxNorm box = corner_to_norm(corners[i].box, img_w, img_h);
    if (!box.valid()) throw RangeError(static_cast<int>(i) + 1, "box has zero area inside the image");
    out.push_back({id, box});
  }
  return out;
}

std::vector<CsvRow> csv_rows(std::span<const LabeledImage> dataset, const ClassRegistry& registry) {
  std::vector<const LabeledImage*> order;
  for (const LabeledImage& s : dataset) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(), [](const LabeledImage* a, const LabeledImage* b) {
    return a->source_path < b->source_path;
  });
  std::vector<CsvRow> rows;
  for (const LabeledImage* s : order) {
    for (const YoloLabel& l : s->labels) {
      rows.push_back({s->source_path, s->image.width(), s->image.height(), registry.name(l.class_id),
                      norm_to_corner(l.box, s->image.width(), s->image.height())});
    }
  }
  return rows;
}

std::string format_csv(std::span<const CsvRow> rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const CsvRow& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", csv_field(r.filename), r.width, r.height,
                       csv_field(r.class_name), r.box.x_min, r.box.y_min, r.box.x_max, r.box.y_max);
  }
  return out;
}

std::string aggregate_csv(std::span<const LabeledImage> dataset, const ClassRegistry& registry) {
  return format_csv(csv_rows(dataset, registry));
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::size_t pos = 0;
  int line_no = 0;
  std::vector<std::string> fields;
  if (!next_csv_record(text, pos, line_no, fields)) throw ParseError(1, "empty CSV");
  std::string header;
  for (std::size_t i = 0; i < fields.size(); ++i) header += (i ? "," : "") + fields[i];
  if (header != kCsvHeader) throw ParseError(1, fmt::format("unexpected CSV header '{}'", header));

  std::vector<CsvRow> rows;
  while (next_csv_record(text, pos, line_no, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 8) {
      throw ParseError(line_no, fmt::format("expected 8 CSV fields, got {}", fields.size()));
    }
    CsvRow row;
    row.filename = fields[0];
    row.width = parse_integer(fields[1], line_no, "width");
    row.height = parse_integer(fields[2], line_no, "height");
    row.class_name = fields[3];
    row.box = {parse_real(fields[4], line_no, "x_min"), parse_real(fields[5], line_no, "y_min"),
               parse_real(fields[6], line_no, "x_max"), parse_real(fields[7], line_no, "y_max")};
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace yolodesk
