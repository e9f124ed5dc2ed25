// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "polyenc/geometry.hpp"

namespace polyenc::attention {

/// One pyramid level, stored row-major as [y][x][channel].
class FeatureGrid {
 public:
  FeatureGrid(std::size_t height, std::size_t width, std::size_t channels, double fill = 0.0);
  FeatureGrid(std::size_t height, std::size_t width, std::size_t channels,
              std::vector<double> values);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }

  double& at(std::size_t y, std::size_t x, std::size_t c) {
    return values_[(y * width_ + x) * channels_ + c];
  }
  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return values_[(y * width_ + x) * channels_ + c];
  }
  std::span<const double> cell(std::size_t y, std::size_t x) const {
    return std::span<const double>(values_).subspan((y * width_ + x) * channels_, channels_);
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t height_;
  std::size_t width_;
  std::size_t channels_;
  std::vector<double> values_;
};

struct FeaturePyramid {
  std::vector<FeatureGrid> levels;

  std::size_t channels() const { return levels.empty() ? 0 : levels.front().channels(); }
};

/// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  static Matrix identity(std::size_t n);
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

struct AttentionShape {
  std::size_t heads = 8;
  std::size_t levels = 4;
  std::size_t points = 4;

  std::size_t slots() const noexcept { return heads * levels * points; }
  /// Flat index of (head, level, point).
  std::size_t slot(std::size_t m, std::size_t l, std::size_t k) const noexcept {
    return (m * levels + l) * points + k;
  }
};

/// Shared projections. Head m reads value rows [m*d, (m+1)*d) and writes
/// through output columns [m*d, (m+1)*d), d = C / heads, so the pair plays
/// the role of the per-head W'_m and W_m.
struct AttentionParams {
  AttentionShape shape;
  Matrix value_proj;  ///< C x C
  Matrix out_proj;    ///< C x C
};

/// A query: normalized reference point in [0,1]^2 plus its per-slot
/// attention weights and sampling offsets (offsets in level cells).
struct Query {
  Point ref_point;
  std::vector<double> weights;
  std::vector<Point> offsets;
};

/// Level-cell coordinates of a normalized point: cell centers sit on
/// integers, so p * size - 0.5.
Point to_level(const FeatureGrid& grid, Point normalized);

/// Bilinear interpolation at `loc` (cell coordinates). Cells outside the
/// grid read as zero.
std::vector<double> bilinear_sample(const FeatureGrid& grid, Point loc);

/// Softmax over the levels*points slots of each head.
std::vector<double> normalize_weights(std::span<const double> raw, const AttentionShape& shape);

/// Multi-scale deformable attention with already-normalized weights.
/// Throws Error(kShapeMismatch) on inconsistent channels, heads or slots.
std::vector<std::vector<double>> msda_forward(const FeaturePyramid& pyramid,
                                              std::span<const Query> queries,
                                              const AttentionParams& params);

/// Same, but each query's weights are raw logits normalized first.
std::vector<std::vector<double>> msda_forward_raw(const FeaturePyramid& pyramid,
                                                  std::span<const Query> queries,
                                                  const AttentionParams& params);

}  // namespace polyenc::attention
