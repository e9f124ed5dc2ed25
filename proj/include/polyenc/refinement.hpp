// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "polyenc/encoding.hpp"
#include "polyenc/geometry.hpp"

namespace polyenc {

struct RefineConfig {
  double score_threshold = 0.1;
  /// Suppression radius in vertices (circular).
  std::size_t nms_window = 2;
  std::size_t min_vertices = 3;
  /// When false only the score threshold is applied.
  bool use_nms = true;
};

/// Throws Error(kInvalidArgument) if a field is out of range.
void validate(const RefineConfig& cfg);

/// Indices i with scores[i] >= scores[j] for every j within circular
/// distance `window`. Among equal scores only the lowest index survives, so
/// a plateau keeps a single vertex. Returned in increasing order.
std::vector<std::size_t> nms_1d_circular(std::span<const double> scores, std::size_t window);

/// Threshold, then circular NMS on the thresholded scores. Falls back to
/// the `min_vertices` best-scoring indices when too few survive.
Ring refine(const EncodedPolygon& pred, const RefineConfig& cfg = {});

/// Keeps the leading run of vertices scoring at least the threshold.
Ring refine_zeropad(const EncodedPolygon& pred, const RefineConfig& cfg = {});
Ring refine_zeropad(const EncodedPolygon& pred, double threshold);

/// Dispatches on pred.scheme.
Ring refine_any(const EncodedPolygon& pred, const RefineConfig& cfg = {});

}  // namespace polyenc
