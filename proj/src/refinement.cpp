// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyenc/refinement.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "polyenc/error.hpp"

namespace polyenc {

namespace {

void check_shape(const EncodedPolygon& pred) {
  if (pred.coords.size() != pred.corner_flags.size()) {
    throw Error(ErrorCode::kLengthMismatch, "coords and corner scores differ in length");
  }
}

// The `count` highest scores, ties to the lowest index, in sequence order.
std::vector<std::size_t> top_scoring(std::span<const double> scores, std::size_t count) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(count, order.size()));
  std::sort(order.begin(), order.end());
  return order;
}

Ring build_ring(const EncodedPolygon& pred, std::vector<std::size_t> keep,
                std::size_t min_vertices) {
  if (keep.size() < min_vertices) keep = top_scoring(pred.corner_flags, min_vertices);
  std::vector<Point> pts;
  pts.reserve(keep.size());
  for (std::size_t i : keep) pts.push_back(pred.coords[i]);
  try {
    return Ring::from_points_dedup(pts);
  } catch (const Error&) {
    throw Error(ErrorCode::kZeroArea, "refined polygon has fewer than 3 distinct vertices");
  }
}

}  // namespace

void validate(const RefineConfig& cfg) {
  if (!(cfg.score_threshold >= 0.0 && cfg.score_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "score threshold must lie in [0, 1]");
  }
  if (cfg.nms_window < 1) throw Error(ErrorCode::kInvalidArgument, "nms window must be >= 1");
  if (cfg.min_vertices < 3) throw Error(ErrorCode::kInvalidArgument, "min_vertices must be >= 3");
}

std::vector<std::size_t> nms_1d_circular(std::span<const double> scores, std::size_t window) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> kept;
  const std::size_t reach = std::min(window, n / 2);
  for (std::size_t i = 0; i < n; ++i) {
    bool keep = true;
    for (std::size_t d = 1; d <= reach && keep; ++d) {
      for (std::size_t j : {(i + d) % n, (i + n - d) % n}) {
        if (scores[j] > scores[i] || (scores[j] == scores[i] && j < i)) {
          keep = false;
          break;
        }
      }
    }
    if (keep) kept.push_back(i);
  }
  return kept;
}

Ring refine(const EncodedPolygon& pred, const RefineConfig& cfg) {
  validate(cfg);
  check_shape(pred);
  const auto& scores = pred.corner_flags;

  std::vector<double> masked(scores.size(), -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= cfg.score_threshold) {
      masked[i] = scores[i];
      candidates.push_back(i);
    }
  }
  if (!cfg.use_nms) return build_ring(pred, std::move(candidates), cfg.min_vertices);

  std::vector<std::size_t> survivors;
  for (std::size_t i : nms_1d_circular(masked, cfg.nms_window)) {
    if (scores[i] >= cfg.score_threshold) survivors.push_back(i);
  }
  return build_ring(pred, std::move(survivors), cfg.min_vertices);
}

Ring refine_zeropad(const EncodedPolygon& pred, const RefineConfig& cfg) {
  validate(cfg);
  check_shape(pred);
  std::vector<std::size_t> prefix;
  for (std::size_t i = 0; i < pred.corner_flags.size(); ++i) {
    if (!(pred.corner_flags[i] >= cfg.score_threshold)) break;
    prefix.push_back(i);
  }
  return build_ring(pred, std::move(prefix), cfg.min_vertices);
}

Ring refine_zeropad(const EncodedPolygon& pred, double threshold) {
  RefineConfig cfg;
  cfg.score_threshold = threshold;
  return refine_zeropad(pred, cfg);
}

Ring refine_any(const EncodedPolygon& pred, const RefineConfig& cfg) {
  return pred.scheme == Scheme::kZeroPad ? refine_zeropad(pred, cfg) : refine(pred, cfg);
}

}  // namespace polyenc
