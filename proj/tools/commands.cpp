// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "kernel_check.hpp"
#include "polyenc/dataset_io.hpp"
#include "polyenc/defaults.hpp"
#include "polyenc/encoding.hpp"
#include "polyenc/error.hpp"
#include "polyenc/metrics.hpp"
#include "polyenc/refinement.hpp"

namespace polyenc::cli {

namespace {

struct EncodeArgs {
  std::string coco;
  std::string scheme = "uniform";
  std::size_t m = 96;
  bool phase1 = false;
  std::string out;
};

struct RefineArgs {
  std::string pred;
  double threshold = 0.1;
  std::size_t nms_window = 2;
  bool no_nms = false;
  std::size_t min_vertices = 3;
  std::string out;
};

struct EvalArgs {
  std::string gt;
  std::string pred;
  std::string iou_mode = "per-image";
  std::string c_iou_mode = "per-pair";
  std::string out;
};

struct SynthArgs {
  std::size_t n = 100;
  std::uint64_t seed = 42;
  std::string out;
  std::string shapes = "rect,rotated,lshape,ngon";
  std::string noisy_pred;
  double coord_noise = 1.0;
  double score_noise = 0.1;
  std::size_t m = 96;
  std::string svg_dir;
};

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

void print_histogram(std::ostream& out, const char* label, const std::map<std::size_t, std::size_t>& hist) {
  out << label << ":";
  for (const auto& [vertices, count] : hist) out << " " << vertices << "x" << count;
  out << "\n";
}

int cmd_encode(const EncodeArgs& a, std::ostream& out, std::ostream& err) {
  const io::CocoDocument doc = io::read_coco(a.coco);
  const bool zeropad = a.scheme == "zeropad";
  const EncodingConfig cfg{a.m, a.phase1};

  std::vector<io::PredictionRecord> records;
  std::size_t corners = 0, simplified = 0, failed = 0;
  for (const io::Scene& scene : doc.scenes) {
    for (const Ring& ring : scene.instances) {
      try {
        const EncodedPolygon poly = zeropad ? encode_zeropad(ring, cfg) : encode_uniform(ring, cfg);
        corners += ring.size();
        if (ring.size() > a.m) ++simplified;
        records.push_back(io::from_encoded(scene.image_id, 1.0, poly));
      } catch (const Error& e) {
        ++failed;
        err << "image " << scene.image_id << ": " << e.what() << "\n";
      }
    }
  }
  io::write_predictions(records, a.out);

  out << "scheme: " << a.scheme << "\n";
  out << "m: " << a.m << "\n";
  out << "instances: " << records.size() << "\n";
  out << "skipped_malformed: " << doc.malformed << "\n";
  out << "failed: " << failed << "\n";
  out << "mean_corners: "
      << fmt("%.3f", records.empty() ? 0.0 : static_cast<double>(corners) / static_cast<double>(records.size()))
      << "\n";
  out << "simplified: " << simplified << "\n";
  return failed == 0 ? kOk : kDomainFailure;
}

int cmd_refine(const RefineArgs& a, std::ostream& out, std::ostream& err) {
  const RefineConfig cfg{a.threshold, a.nms_window, a.min_vertices, !a.no_nms};
  validate(cfg);
  const std::vector<io::PredictionRecord> records = io::read_predictions(a.pred);

  std::vector<io::PredictionRecord> refined;
  std::map<std::size_t, std::size_t> before, after;
  std::size_t no_scores = 0, failed = 0;
  for (const io::PredictionRecord& r : records) {
    if (!r.corner_scores) {
      ++no_scores;
      continue;
    }
    try {
      const Ring ring = refine_any(io::to_encoded(r), cfg);
      ++before[r.polygon.size()];
      ++after[ring.size()];
      refined.push_back({r.image_id, r.score, ring.vertices(), std::nullopt, std::nullopt});
    } catch (const Error& e) {
      ++failed;
      err << "image " << r.image_id << ": " << e.what() << "\n";
    }
  }
  io::write_predictions(refined, a.out);

  out << "refined: " << refined.size() << "\n";
  out << "skipped_without_corner_scores: " << no_scores << "\n";
  out << "failed: " << failed << "\n";
  print_histogram(out, "vertices_before", before);
  print_histogram(out, "vertices_after", after);
  return failed == 0 ? kOk : kDomainFailure;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const io::CocoDocument doc = io::read_coco(a.gt);
  const std::vector<io::PredictionRecord> records = io::read_predictions(a.pred);

  metrics::EvalConfig cfg = io::eval_config_for(doc.scenes);
  cfg.iou_mode = a.iou_mode == "pooled" ? metrics::IouMode::kPooled : metrics::IouMode::kPerImage;
  cfg.c_iou_mode = a.c_iou_mode == "per-image" ? metrics::CIouMode::kPerImage : metrics::CIouMode::kPerPair;

  const std::vector<metrics::GtInstance> gts = io::gt_instances(doc.scenes);
  std::vector<metrics::PredInstance> preds;
  preds.reserve(records.size());
  for (const io::PredictionRecord& r : records) {
    preds.push_back({r.image_id, Ring::from_points_dedup(r.polygon), r.score});
  }
  const std::string report = metrics::format_report(metrics::evaluate(gts, preds, cfg), cfg);
  out << report;
  if (!a.out.empty()) {
    std::ofstream file(a.out, std::ios::binary);
    if (!(file << report)) throw Error(ErrorCode::kIoError, "cannot write " + a.out);
  }
  return kOk;
}

io::SynthConfig parse_shapes(const std::string& list) {
  io::SynthConfig cfg;
  cfg.rectangles = cfg.rotated_rectangles = cfg.l_shapes = cfg.regular_polygons = false;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "rect") cfg.rectangles = true;
    else if (item == "rotated") cfg.rotated_rectangles = true;
    else if (item == "lshape") cfg.l_shapes = true;
    else if (item == "ngon") cfg.regular_polygons = true;
    else throw Error(ErrorCode::kInvalidArgument, "unknown shape family '" + item + "'");
  }
  return cfg;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const std::vector<io::Scene> scenes = io::synth_scenes(a.n, a.seed, parse_shapes(a.shapes));
  io::write_coco(scenes, a.out);
  std::size_t instances = 0;
  for (const io::Scene& s : scenes) instances += s.instances.size();
  out << "scenes: " << scenes.size() << "\n";
  out << "instances: " << instances << "\n";

  std::vector<io::PredictionRecord> noisy;
  if (!a.noisy_pred.empty()) {
    noisy = io::simulate_predictions(scenes, {a.coord_noise, a.score_noise, a.m, a.seed});
    io::write_predictions(noisy, a.noisy_pred);
    out << "noisy_predictions: " << noisy.size() << "\n";
  }
  if (!a.svg_dir.empty()) {
    std::filesystem::create_directories(a.svg_dir);
    for (const io::Scene& scene : scenes) {
      std::vector<Ring> rings;
      for (const io::PredictionRecord& r : noisy) {
        if (r.image_id == scene.image_id) rings.push_back(refine_any(io::to_encoded(r)));
      }
      char name[32];
      std::snprintf(name, sizeof name, "scene_%06lld.svg", static_cast<long long>(scene.image_id));
      io::render_svg(scene, rings, std::filesystem::path(a.svg_dir) / name);
    }
  }
  return kOk;
}

int cmd_kernel_check(const KernelCheckOptions& opt, std::ostream& out) {
  bool all = true;
  for (const PropertyResult& r : run_kernel_checks(opt)) {
    all = all && r.passed;
    char line[160];
    std::snprintf(line, sizeof line, "%s %-32s worst=%.3e\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.worst);
    out << line;
  }
  return all ? kOk : kDomainFailure;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kParseError:
    case ErrorCode::kIoError:
    case ErrorCode::kMalformedPolygon:
    case ErrorCode::kInvalidArgument:
      return kUsage;
    default:
      return kDomainFailure;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polygon encoding, refinement and evaluation toolkit", "polyenc"};
  app.require_subcommand(1);

  EncodeArgs encode;
  auto* enc = app.add_subcommand("encode", "Encode COCO polygons as fixed-length sequences");
  enc->add_option("--coco", encode.coco, "COCO annotation file")->required();
  enc->add_option("--scheme", encode.scheme)->check(CLI::IsMember({"uniform", "zeropad"}));
  enc->add_option("--m", encode.m, "Sequence length")->check(CLI::Range(std::size_t{4}, std::size_t{100000}));
  enc->add_flag("--phase1", encode.phase1, "Label every uniform sample as a corner");
  enc->add_option("--out", encode.out, "Prediction file to write")->required();

  RefineArgs refine_args;
  auto* ref = app.add_subcommand("refine", "Recover polygons from corner scores");
  ref->add_option("--pred", refine_args.pred, "Prediction file with corner scores")->required();
  ref->add_option("--threshold", refine_args.threshold)->check(CLI::Range(0.0, 1.0));
  ref->add_option("--nms-window", refine_args.nms_window)->check(CLI::PositiveNumber);
  ref->add_flag("--no-nms", refine_args.no_nms, "Apply the score threshold only");
  ref->add_option("--min-vertices", refine_args.min_vertices)->check(CLI::Range(std::size_t{3}, std::size_t{100000}));
  ref->add_option("--out", refine_args.out, "Prediction file to write")->required();

  EvalArgs eval;
  auto* ev = app.add_subcommand("eval", "Score predictions against COCO ground truth");
  ev->add_option("--gt", eval.gt, "COCO annotation file")->required();
  ev->add_option("--pred", eval.pred, "Prediction file")->required();
  ev->add_option("--iou-mode", eval.iou_mode)->check(CLI::IsMember({"per-image", "pooled"}));
  ev->add_option("--c-iou-mode", eval.c_iou_mode)->check(CLI::IsMember({"per-pair", "per-image"}));
  ev->add_option("--out", eval.out, "Report file (also printed)");

  SynthArgs synth;
  auto* sy = app.add_subcommand("synth", "Generate synthetic building scenes");
  sy->add_option("--n", synth.n)->check(CLI::PositiveNumber);
  sy->add_option("--seed", synth.seed);
  sy->add_option("--out", synth.out, "COCO file to write")->required();
  sy->add_option("--shapes", synth.shapes, "Comma list of rect, rotated, lshape, ngon");
  sy->add_option("--noisy-pred", synth.noisy_pred, "Also write simulated predictions");
  sy->add_option("--coord-noise", synth.coord_noise)->check(CLI::NonNegativeNumber);
  sy->add_option("--score-noise", synth.score_noise)->check(CLI::NonNegativeNumber);
  sy->add_option("--m", synth.m)->check(CLI::Range(std::size_t{4}, std::size_t{100000}));
  sy->add_option("--svg-dir", synth.svg_dir, "Write one SVG overlay per scene");

  KernelCheckOptions kernel;
  auto* kc = app.add_subcommand("kernel-check", "Attention invariants and loss gradient checks");
  kc->add_option("--heads", kernel.heads)->check(CLI::PositiveNumber);
  kc->add_option("--levels", kernel.levels)->check(CLI::PositiveNumber);
  kc->add_option("--points", kernel.points)->check(CLI::PositiveNumber);
  kc->add_option("--seed", kernel.seed);
  kc->add_option("--configs", kernel.configurations)->check(CLI::PositiveNumber);
  kc->add_flag("--inject-normalization-bug", kernel.inject_normalization_bug)->group("");

  std::string config_out;
  auto* cf = app.add_subcommand("config", "Print the default hyperparameters");
  cf->add_option("--out", config_out, "Also write them to this file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*enc) return cmd_encode(encode, out, err);
    if (*ref) return cmd_refine(refine_args, out, err);
    if (*ev) return cmd_eval(eval, out);
    if (*sy) return cmd_synth(synth, out);
    if (*kc) return cmd_kernel_check(kernel, out);
    const std::string text = serialize_defaults();
    out << text;
    if (!config_out.empty()) {
      std::ofstream file(config_out, std::ios::binary);
      if (!(file << text)) throw Error(ErrorCode::kIoError, "cannot write " + config_out);
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace polyenc::cli
