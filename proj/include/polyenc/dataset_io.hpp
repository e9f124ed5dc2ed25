// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polyenc/encoding.hpp"
#include "polyenc/geometry.hpp"
#include "polyenc/metrics.hpp"

namespace polyenc::io {

struct Scene {
  std::int64_t image_id = 0;
  std::string file_name;
  int width = 300;
  int height = 300;
  std::vector<Ring> instances;
};

struct CocoDocument {
  std::vector<Scene> scenes;  ///< ordered by image id
  /// Annotations skipped because their polygon could not be used.
  std::size_t malformed = 0;
  std::vector<std::string> warnings;
};

/// Reads the COCO subset used for building footprints: images[] with
/// {id, file_name, width, height} and annotations[] with {image_id,
/// segmentation: [[x1, y1, ...]], ...}. Only the first ring of a
/// segmentation is used. Unusable polygons are skipped and counted;
/// structural problems throw Error(kParseError) naming the line or field.
CocoDocument read_coco(const std::filesystem::path& path);
CocoDocument parse_coco(std::string_view text);

void write_coco(std::span<const Scene> scenes, const std::filesystem::path& path);
std::string coco_to_string(std::span<const Scene> scenes);

struct SynthConfig {
  int frame = 300;
  bool rectangles = true;
  bool rotated_rectangles = true;
  bool l_shapes = true;
  bool regular_polygons = true;
  int min_instances = 1;
  int max_instances = 6;
};

/// Deterministic non-overlapping building-like rings in a frame x frame
/// image. Scene i uses a stream derived from (seed, i).
std::vector<Scene> synth_scenes(std::size_t count, std::uint64_t seed, const SynthConfig& cfg = {});

struct PredictionRecord {
  std::int64_t image_id = 0;
  double score = 0.0;
  std::vector<Point> polygon;
  std::optional<std::vector<double>> corner_scores;
  std::optional<Scheme> scheme;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

/// JSON array of {image_id, score, polygon: [x, y, ...], corner_scores?,
/// scheme?}. Reals are written with 17 significant digits.
void write_predictions(std::span<const PredictionRecord> records, const std::filesystem::path& path);
std::string predictions_to_string(std::span<const PredictionRecord> records);
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);
std::vector<PredictionRecord> parse_predictions(std::string_view text);

/// Encoded polygon view of a record; needs corner_scores.
EncodedPolygon to_encoded(const PredictionRecord& record);
PredictionRecord from_encoded(std::int64_t image_id, double score, const EncodedPolygon& poly);

struct NoiseConfig {
  double coord_sigma = 1.0;
  double score_sigma = 0.1;
  std::size_t m = 96;
  std::uint64_t seed = 42;
};

/// Stand-in for network output: every gt ring is uniformly encoded, its
/// coordinates jittered, and its corner flags degraded so that score mass
/// leaks onto the two neighbours on each side of a corner and onto the
/// walls. All perturbations scale with the sigmas; zero noise returns the
/// encoded ground truth unchanged.
std::vector<PredictionRecord> simulate_predictions(std::span<const Scene> scenes,
                                                   const NoiseConfig& cfg = {});

std::vector<metrics::GtInstance> gt_instances(std::span<const Scene> scenes);
metrics::EvalConfig eval_config_for(std::span<const Scene> scenes);

/// SVG 1.1 overlay: ground truth in green, predictions in red, vertices as
/// dots. Identical input gives identical bytes.
std::string svg_string(const Scene& scene, std::span<const Ring> predictions);
void render_svg(const Scene& scene, std::span<const Ring> predictions,
                const std::filesystem::path& path);

}  // namespace polyenc::io
