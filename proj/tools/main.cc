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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "yolodesk/augment.h"
#include "yolodesk/error.h"
#include "yolodesk/eval.h"
#include "yolodesk/head_io.h"
#include "yolodesk/image.h"
#include "yolodesk/io.h"
#include "yolodesk/labels.h"
#include "yolodesk/netdef.h"
#include "yolodesk/postprocess.h"
#include "yolodesk/run_config.h"
#include "yolodesk/synth.h"

namespace fs = std::filesystem;
using namespace yolodesk;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailures = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

constexpr const char* kHeadExtension = ".yf";

struct Globals {
  std::string config_path;
  bool dump_config = false;
  std::string classes;
  std::optional<int> input_n;
  std::optional<std::uint64_t> seed;
};

RunConfig load_config(const Globals& g) {
  RunConfig config = g.config_path.empty() ? RunConfig{} : parse_run_config(read_file_text(g.config_path));
  if (!g.classes.empty()) config.classes = g.classes;
  if (g.input_n) config.input_n = *g.input_n;
  if (g.seed) config.seed = *g.seed;
  validate(config);
  return config;
}

// Explicit path first, then <dir>/classes.txt, then the built-in parts list.
ClassRegistry load_registry(const RunConfig& config, const fs::path& dataset_dir = {}) {
  if (!config.classes.empty()) return parse_classes(read_file_text(config.classes));
  if (!dataset_dir.empty() && fs::exists(dataset_dir / "classes.txt")) {
    return parse_classes(read_file_text(dataset_dir / "classes.txt"));
  }
  return default_part_registry();
}

std::vector<LabeledImage> load_dataset(const fs::path& dir, const ClassRegistry& registry) {
  std::vector<LabeledImage> out;
  for (const fs::path& image_path : list_files(dir, ".ppm")) {
    LabeledImage sample;
    sample.image = read_ppm(read_file_bytes(image_path));
    const fs::path label_path = fs::path(image_path).replace_extension(".txt");
    if (fs::exists(label_path)) {
      try {
        sample.labels = read_yolo_labels(read_file_text(label_path), registry);
      } catch (const ParseError& e) {
        throw ParseError(0, fmt::format("{}: {}", label_path.string(), e.what()));
      }
    }
    sample.source_path = image_path.stem().string();
    out.push_back(std::move(sample));
  }
  return out;
}

void save_dataset(const fs::path& dir, std::span<const LabeledImage> samples, const ClassRegistry& registry) {
  fs::create_directories(dir);
  write_file_text(dir / "classes.txt", format_classes(registry));
  for (const LabeledImage& s : samples) {
    const std::string stem = fs::path(s.source_path).stem().string();
    write_file_bytes(dir / (stem + ".ppm"), write_ppm(s.image));
    write_file_text(dir / (stem + ".txt"), write_yolo_labels(s.labels));
  }
}

std::vector<fs::path> label_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const fs::path& p : list_files(dir, ".txt")) {
    if (p.filename() != "classes.txt") out.push_back(p);
  }
  return out;
}

std::vector<Tensor> load_heads(std::span<const std::string> paths) {
  std::vector<Tensor> heads;
  for (const std::string& p : paths) {
    try {
      heads.push_back(read_head(read_file_bytes(p)));
    } catch (const FormatError& e) {
      throw FormatError(fmt::format("{}: {}", p, e.what()));
    }
  }
  std::stable_sort(heads.begin(), heads.end(),
                   [](const Tensor& a, const Tensor& b) { return a.height() > b.height(); });
  return heads;
}

// --- netinfo ---------------------------------------------------------------

struct NetinfoArgs {
  std::string cfg;
  std::optional<int> input_n;
  bool json = false;
};

int run_netinfo(const NetinfoArgs& args) {
  NetGraph graph = parse_cfg(read_file_text(args.cfg));
  if (args.input_n) graph = with_input_size(graph, *args.input_n);
  graph = propagate_shapes(graph);
  const NetCensus c = census(graph);
  if (args.json) {
    fmt::print("{}\n", census_to_json(graph, c).dump(2));
  } else {
    fmt::print("{}", census_table(graph, c));
  }
  return kExitOk;
}

// --- augment ---------------------------------------------------------------

struct AugmentArgs {
  std::string dir;
  std::string out;
  std::vector<double> rotations;
  std::vector<std::string> flips;
  std::optional<int> class_floor;
};

int run_augment(const Globals& g, const AugmentArgs& args) {
  RunConfig config = load_config(g);
  ExpansionPlan plan = config.augment;
  if (!args.rotations.empty()) plan.rotations = args.rotations;
  if (!args.flips.empty()) {
    plan.flips.clear();
    for (const std::string& f : args.flips) {
      if (f == "h") {
        plan.flips.push_back(FlipAxis::kHorizontal);
      } else if (f == "v") {
        plan.flips.push_back(FlipAxis::kVertical);
      } else if (f != "none") {
        throw ParseError(0, fmt::format("--flips takes h, v or none, got '{}'", f));
      }
    }
  }
  if (args.class_floor) plan.class_floor = *args.class_floor;

  const ClassRegistry registry = load_registry(config, args.dir);
  const auto samples = load_dataset(args.dir, registry);
  const ExpansionResult result = expand_dataset(samples, plan, registry.size());
  save_dataset(args.out, result.images, registry);

  fmt::print("{} source images -> {} images\n", samples.size(), result.images.size());
  for (int c = 0; c < registry.size(); ++c) {
    const bool low = std::find(result.below_floor.begin(), result.below_floor.end(), c) != result.below_floor.end();
    fmt::print("{:<14} {:>7}{}\n", registry.name(c), result.images_per_class[c], low ? "  below floor" : "");
  }
  fmt::print("class floor {}: {} classes below\n", plan.class_floor, result.below_floor.size());
  return kExitOk;
}

// --- labels ----------------------------------------------------------------

struct ConvertArgs {
  std::string from = "labelimg";
  std::string to = "yolo";
  std::string dir;
  std::string out;
};

int run_labels_convert(const Globals& g, const ConvertArgs& args) {
  const RunConfig config = load_config(g);
  const ClassRegistry registry = load_registry(config, args.dir);
  fs::create_directories(args.out);
  int files = 0;
  for (const fs::path& image_path : list_files(args.dir, ".ppm")) {
    const Image image = read_ppm(read_file_bytes(image_path));
    const fs::path corner_path = fs::path(image_path).replace_extension(".txt");
    std::vector<CornerLabel> corners;
    if (fs::exists(corner_path)) {
      try {
        corners = read_labelimg_corners(read_file_text(corner_path), image.width(), image.height());
      } catch (const ParseError& e) {
        throw ParseError(0, fmt::format("{}: {}", corner_path.string(), e.what()));
      }
    }
    const auto labels = corners_to_yolo(corners, image.width(), image.height(), registry);
    write_file_text(fs::path(args.out) / corner_path.filename(), write_yolo_labels(labels));
    ++files;
  }
  write_file_text(fs::path(args.out) / "classes.txt", format_classes(registry));
  fmt::print(stderr, "converted {} label files\n", files);
  return kExitOk;
}

struct CsvArgs {
  std::string dir;
  std::string out;
};

int run_labels_csv(const Globals& g, const CsvArgs& args) {
  const RunConfig config = load_config(g);
  const ClassRegistry registry = load_registry(config, args.dir);
  auto samples = load_dataset(args.dir, registry);
  for (LabeledImage& s : samples) s.source_path += ".ppm";
  const std::string csv = aggregate_csv(samples, registry);
  if (args.out.empty()) {
    fmt::print("{}", csv);
  } else {
    write_file_text(args.out, csv);
  }
  return kExitOk;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string scenario = "1";
  int count = 50;
  std::string out;
};

int run_synth(const Globals& g, const SynthArgs& args) {
  const RunConfig config = load_config(g);
  const ClassRegistry registry = load_registry(config);
  if (args.count < 0) throw RangeError(0, "--count must be non-negative");
  const auto scenes = generate_scenario(parse_scenario(args.scenario), config.seed, args.count, registry);
  std::vector<LabeledImage> samples;
  for (const Scene& s : scenes) samples.push_back(s.sample);
  save_dataset(args.out, samples, registry);
  fmt::print(stderr, "wrote {} scenes to {}\n", samples.size(), args.out);
  return kExitOk;
}

// --- stub-heads ------------------------------------------------------------

struct StubArgs {
  std::string dir;
  std::string out;
};

int run_stub_heads(const Globals& g, const StubArgs& args) {
  const RunConfig config = load_config(g);
  const ClassRegistry registry = load_registry(config, args.dir);
  fs::create_directories(args.out);
  int frames = 0;
  for (const fs::path& label_path : label_files(args.dir)) {
    std::vector<TruthLabel> truth;
    for (const YoloLabel& l : read_yolo_labels(read_file_text(label_path), registry)) {
      truth.push_back({l.class_id, l.box});
    }
    const auto heads = encode_truth_heads(truth, config.anchors, registry.size(), config.input_n);
    const std::string stem = label_path.stem().string();
    for (int s = 0; s < 3; ++s) {
      write_file_bytes(fs::path(args.out) / fmt::format("{}_s{}{}", stem, s, kHeadExtension), write_head(heads[s]));
    }
    ++frames;
  }
  fmt::print(stderr, "wrote heads for {} frames\n", frames);
  return kExitOk;
}

// --- detect ----------------------------------------------------------------

struct DetectArgs {
  std::vector<std::string> heads;
  std::string heads_dir;
  std::string out;
  std::string anchors;
  std::optional<double> objectness_threshold;
  std::optional<double> iou_threshold;
  std::optional<double> confidence_floor;
  bool json = false;
};

int run_detect(const Globals& g, const DetectArgs& args) {
  RunConfig config = load_config(g);
  if (!args.anchors.empty()) config.anchors = parse_anchors(args.anchors);
  if (args.objectness_threshold) config.detect.nms.objectness_threshold = *args.objectness_threshold;
  if (args.iou_threshold) config.detect.nms.iou_threshold = *args.iou_threshold;
  if (args.confidence_floor) config.detect.confidence_floor = *args.confidence_floor;
  validate(config);
  const ClassRegistry registry = load_registry(config);

  const auto render = [&](std::span<const Detection> dets) {
    return args.json ? detections_to_json(dets).dump(2) + "\n" : format_detections(dets);
  };

  if (!args.heads.empty()) {
    if (args.heads.size() != 3) throw ParseError(0, "--heads takes exactly three tensor files");
    const auto heads = load_heads(args.heads);
    const auto dets = detect_frame(heads, config.anchors, config.detect, registry.names());
    if (args.out.empty()) {
      fmt::print("{}", render(dets));
    } else {
      write_file_text(args.out, render(dets));
    }
    return kExitOk;
  }

  if (args.heads_dir.empty() || args.out.empty()) {
    throw ParseError(0, "detect needs --heads a b c, or --heads-dir with --out");
  }
  std::map<std::string, std::vector<std::string>> frames;
  for (const fs::path& p : list_files(args.heads_dir, kHeadExtension)) {
    const std::string stem = p.stem().string();
    const auto cut = stem.rfind("_s");
    if (cut == std::string::npos) throw ParseError(0, fmt::format("{}: expected <frame>_s<scale>", p.string()));
    frames[stem.substr(0, cut)].push_back(p.string());
  }
  fs::create_directories(args.out);
  for (const auto& [frame, paths] : frames) {
    const auto heads = load_heads(paths);
    const auto dets = detect_frame(heads, config.anchors, config.detect, registry.names());
    write_file_text(fs::path(args.out) / (frame + (args.json ? ".json" : ".txt")), render(dets));
  }
  fmt::print(stderr, "processed {} frames\n", frames.size());
  return kExitOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string detections;
  std::string truth;
  std::string scenario;
  std::string out;
  bool json = false;
};

int run_eval(const Globals& g, const EvalArgs& args) {
  const RunConfig config = load_config(g);
  const ClassRegistry registry = load_registry(config, args.truth);
  const double scale = config.input_n;

  std::vector<ImageEval> images;
  for (const fs::path& label_path : label_files(args.truth)) {
    ImageEval img;
    img.name = label_path.stem().string();
    for (const YoloLabel& l : read_yolo_labels(read_file_text(label_path), registry)) {
      img.truths.push_back({l.class_id, norm_to_corner(l.box, 1.0, 1.0)});
    }
    const fs::path det_path = fs::path(args.detections) / label_path.filename();
    if (fs::exists(det_path)) {
      try {
        img.detections = parse_detections(read_file_text(det_path), registry.names());
      } catch (const ParseError& e) {
        throw ParseError(0, fmt::format("{}: {}", det_path.string(), e.what()));
      }
      for (Detection& d : img.detections) {
        d.box = {d.box.x_min / scale, d.box.y_min / scale, d.box.x_max / scale, d.box.y_max / scale};
      }
    }
    images.push_back(std::move(img));
  }

  const EvalReport report = args.scenario.empty() ? map_50_95(images) : scenario_report(images, args.scenario);
  const std::string text =
      args.json ? report_to_json(report, registry.names()).dump(2) + "\n" : report_table(report, registry.names());
  if (args.out.empty()) {
    fmt::print("{}", text);
  } else {
    write_file_text(args.out, text);
  }
  return report.failed_images > 0 ? kExitFailures : kExitOk;
}

// --- bench -----------------------------------------------------------------

struct BenchArgs {
  int frames = 100;
  int input_n = 416;
  int classes = 13;
};

int run_bench(const Globals& g, const BenchArgs& args) {
  const RunConfig config = load_config(g);
  if (args.frames <= 0) throw RangeError(0, "--frames must be positive");
  require_stride_multiple(args.input_n);
  const int channels = head_channels(args.classes);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> logit(-2.0, 2.0);
  std::vector<Tensor> heads;
  for (int stride : {8, 16, 32}) {
    const int n = args.input_n / stride;
    std::vector<double> values(static_cast<std::size_t>(n) * n * channels);
    for (double& v : values) v = logit(rng);
    heads.emplace_back(n, n, channels, std::move(values));
  }
  std::vector<std::string> names;
  for (int c = 0; c < args.classes; ++c) names.push_back(fmt::format("c{}", c));

  std::vector<double> ms;
  std::size_t kept = 0;
  for (int f = 0; f < args.frames; ++f) {
    const auto start = std::chrono::steady_clock::now();
    kept = detect_frame(heads, config.anchors, config.detect, names).size();
    const auto stop = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  std::sort(ms.begin(), ms.end());
  const auto rank = [&](double q) {
    const auto i = static_cast<std::size_t>(std::ceil(q * static_cast<double>(ms.size()))) - 1;
    return ms[std::min(i, ms.size() - 1)];
  };
  fmt::print("frames {}  input {}  candidates {}  kept {}\n", args.frames, args.input_n,
             3 * total_grid_cells(args.input_n), kept);
  fmt::print("p50 {:.3f} ms  p99 {:.3f} ms  max {:.3f} ms\n", rank(0.50), rank(0.99), ms.back());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"yolodesk: detector network inspection, post-processing, datasets and evaluation"};
  app.require_subcommand(0, 1);

  Globals g;
  app.add_option("--config", g.config_path, "flat key = value run configuration");
  app.add_flag("--dump-config", g.dump_config, "print the effective configuration and exit");
  app.add_option("--classes", g.classes, "classes.txt, one name per line");
  app.add_option("--input", g.input_n, "network input size, a multiple of 32");
  app.add_option("--seed", g.seed, "random seed");

  NetinfoArgs netinfo;
  auto* netinfo_cmd = app.add_subcommand("netinfo", "parse a cfg, propagate shapes, print the census");
  netinfo_cmd->add_option("cfg", netinfo.cfg, "network cfg file")->required();
  netinfo_cmd->add_option("--input", netinfo.input_n, "override the cfg input size");
  netinfo_cmd->add_flag("--json", netinfo.json);

  AugmentArgs augment;
  auto* augment_cmd = app.add_subcommand("augment", "expand a dataset by rotations and flips");
  augment_cmd->add_option("dir", augment.dir, "dataset directory")->required();
  augment_cmd->add_option("--out", augment.out)->required();
  augment_cmd->add_option("--rotations", augment.rotations, "degrees, comma separated")->delimiter(',');
  augment_cmd->add_option("--flips", augment.flips, "h, v or none, comma separated")->delimiter(',');
  augment_cmd->add_option("--class-floor", augment.class_floor);

  auto* labels_cmd = app.add_subcommand("labels", "label format tools");
  labels_cmd->require_subcommand(1);
  ConvertArgs convert;
  auto* convert_cmd = labels_cmd->add_subcommand("convert", "corner labels to YOLO labels");
  convert_cmd->add_option("--from", convert.from)->check(CLI::IsMember({"labelimg"}));
  convert_cmd->add_option("--to", convert.to)->check(CLI::IsMember({"yolo"}));
  convert_cmd->add_option("dir", convert.dir)->required();
  convert_cmd->add_option("--out", convert.out)->required();
  CsvArgs csv;
  auto* csv_cmd = labels_cmd->add_subcommand("csv", "aggregate a dataset into one CSV");
  csv_cmd->add_option("dir", csv.dir)->required();
  csv_cmd->add_option("--out", csv.out);

  DetectArgs detect;
  auto* detect_cmd = app.add_subcommand("detect", "decode, suppress and filter raw head tensors");
  detect_cmd->add_option("--heads", detect.heads, "three head tensor files");
  detect_cmd->add_option("--heads-dir", detect.heads_dir, "directory of <frame>_s<k>.yf files");
  detect_cmd->add_option("--out", detect.out);
  detect_cmd->add_option("--anchors", detect.anchors, "nine w,h pairs");
  detect_cmd->add_option("--objectness-threshold", detect.objectness_threshold);
  detect_cmd->add_option("--iou-threshold", detect.iou_threshold);
  detect_cmd->add_option("--confidence-floor", detect.confidence_floor);
  detect_cmd->add_flag("--json", detect.json);

  StubArgs stub;
  auto* stub_cmd = app.add_subcommand("stub-heads", "encode ground-truth labels as head tensors");
  stub_cmd->add_option("dir", stub.dir)->required();
  stub_cmd->add_option("--out", stub.out)->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "score detections against ground truth");
  eval_cmd->add_option("--detections", eval.detections)->required();
  eval_cmd->add_option("--truth", eval.truth)->required();
  eval_cmd->add_option("--scenario", eval.scenario);
  eval_cmd->add_option("--out", eval.out);
  eval_cmd->add_flag("--json", eval.json);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic scenario dataset");
  synth_cmd->add_option("--scenario", synth.scenario)->required();
  synth_cmd->add_option("--count", synth.count);
  synth_cmd->add_option("--out", synth.out)->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "time detect_frame post-processing");
  bench_cmd->add_option("--frames", bench.frames);
  bench_cmd->add_option("--input", bench.input_n);
  bench_cmd->add_option("--classes", bench.classes);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g.dump_config) {
      fmt::print("{}", format_run_config(load_config(g)));
      return kExitOk;
    }
    if (*netinfo_cmd) return run_netinfo(netinfo);
    if (*augment_cmd) return run_augment(g, augment);
    if (*convert_cmd) return run_labels_convert(g, convert);
    if (*csv_cmd) return run_labels_csv(g, csv);
    if (*detect_cmd) return run_detect(g, detect);
    if (*stub_cmd) return run_stub_heads(g, stub);
    if (*eval_cmd) return run_eval(g, eval);
    if (*synth_cmd) return run_synth(g, synth);
    if (*bench_cmd) return run_bench(g, bench);
    fmt::print(stderr, "{}", app.help());
    return kExitUsage;
  } catch (const IoError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  }
}
