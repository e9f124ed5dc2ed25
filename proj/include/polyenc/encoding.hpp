// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "polyenc/geometry.hpp"

namespace polyenc {

enum class Scheme { kUniformSampling, kZeroPad };

/// Fixed-length vertex sequence plus the parallel corner score sequence.
/// Ground truth carries exact 0/1 flags; predictions carry probabilities.
struct EncodedPolygon {
  std::vector<Point> coords;
  std::vector<double> corner_flags;
  Scheme scheme = Scheme::kUniformSampling;

  std::size_t size() const noexcept { return coords.size(); }
};

struct EncodingConfig {
  std::size_t m = 96;
  /// Emit all-ones corner labels (first training phase). Only meaningful for
  /// uniform sampling; zero padding always marks its padding with zeros.
  bool phase1_labels = false;
};

/// `m` points spaced perimeter/m apart by arc length, starting at vertex 0
/// and following ring order. Throws Error(kTooManyCorners) if the ring has
/// more than `m` vertices.
std::vector<Point> uniform_sample(const Ring& ring, std::size_t m);

struct SnapResult {
  std::vector<Point> points;
  /// Sorted indices now holding an annotated corner.
  std::vector<std::size_t> corner_indices;
  double cost = 0.0;
};

/// Replaces samples with corners along the minimum total Euclidean distance
/// assignment (corners are rows). Every corner appears exactly once.
SnapResult snap_corners(std::span<const Point> samples, std::span<const Point> corners);

/// Repeatedly merges the shortest edge into its midpoint until the ring has
/// at most `m` vertices. Ties go to the lowest edge index; the closing edge
/// merges into vertex 0.
Ring simplify_to(const Ring& ring, std::size_t m);

/// canonicalize -> simplify_to(m) if needed -> uniform_sample -> snap_corners.
EncodedPolygon encode_uniform(const Ring& ring, const EncodingConfig& cfg = {});

/// canonicalize -> simplify_to(m) -> vertices followed by (0,0) padding.
EncodedPolygon encode_zeropad(const Ring& ring, const EncodingConfig& cfg = {});

}  // namespace polyenc
