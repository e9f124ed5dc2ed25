// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "polyenc/encoding.hpp"
#include "polyenc/geometry.hpp"
#include "polyenc/losses.hpp"

namespace polyenc {

/// Dense row-major cost table. Rows are ground-truth instances (or annotated
/// corners), columns are predictions (or samples); either may be larger.
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

struct Assignment {
  /// (row, col) pairs sorted by row, injective in both coordinates.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total_cost = 0.0;

  /// Column assigned to `row`, if any.
  std::optional<std::size_t> col_of(std::size_t row) const;
};

/// Minimum-cost injective matching of size min(rows, cols). Shortest
/// augmenting path with dual potentials, O(min^2 * max).
/// Throws Error(kNonFinite) on NaN or infinite entries.
Assignment solve(const CostMatrix& costs);

struct MatchWeights {
  double lambda_cls = 2.0;
  double lambda_iou = 2.0;
  double lambda_l1 = 5.0;
  /// Weight of an extra polygon L1 term. Zero reproduces the box-only cost;
  /// anything else needs ground-truth polygons.
  double lambda_polygon = 0.0;
};

struct InstancePrediction {
  double class_prob = 0.0;
  BoundingBox box;
  EncodedPolygon polygon;
};

struct GroundTruthTarget {
  BoundingBox box;
  std::optional<EncodedPolygon> polygon;
};

double matching_cost(const BoundingBox& gt_box, const InstancePrediction& pred,
                     const MatchWeights& w = {}, const loss::FocalParams& focal = {});

double matching_cost(const GroundTruthTarget& gt, const InstancePrediction& pred,
                     const MatchWeights& w = {}, const loss::FocalParams& focal = {});

/// Builds the |gts| x |preds| matching-cost table and solves it.
Assignment match_instances(std::span<const BoundingBox> gts,
                           std::span<const InstancePrediction> preds,
                           const MatchWeights& w = {}, const loss::FocalParams& focal = {});

Assignment match_instances(std::span<const GroundTruthTarget> gts,
                           std::span<const InstancePrediction> preds,
                           const MatchWeights& w = {}, const loss::FocalParams& focal = {});

}  // namespace polyenc
