// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyenc/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "polyenc/error.hpp"

namespace polyenc {

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw Error(ErrorCode::kSizeMismatch, "cost matrix expects " + std::to_string(rows * cols) +
                                              " values, got " + std::to_string(values_.size()));
  }
}

std::optional<std::size_t> Assignment::col_of(std::size_t row) const {
  for (const auto& [r, c] : pairs) {
    if (r == row) return c;
  }
  return std::nullopt;
}

namespace {

// Rows <= cols. Returns the column matched to each row.
//
// Classic potentials formulation: rows are added one at a time and a
// Dijkstra-like scan over reduced costs finds the shortest augmenting path.
// Index 0 is a virtual column used as the path root.
std::vector<std::size_t> solve_wide(std::size_t n, std::size_t m,
                                    const auto& cost /* (row, col) -> double */) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> owner(m + 1, 0);  // row (1-based) holding column j
  std::vector<std::size_t> way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::vector<double> min_slack(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < min_slack[j]) {
          min_slack[j] = reduced;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> col_of_row(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (owner[j] != 0) col_of_row[owner[j] - 1] = j - 1;
  }
  return col_of_row;
}

}  // namespace

Assignment solve(const CostMatrix& costs) {
  for (double value : costs.values()) {
    if (!std::isfinite(value)) throw Error(ErrorCode::kNonFinite, "cost matrix entry is not finite");
  }
  Assignment result;
  const std::size_t rows = costs.rows();
  const std::size_t cols = costs.cols();
  if (rows == 0 || cols == 0) return result;

  if (rows <= cols) {
    const auto col_of_row =
        solve_wide(rows, cols, [&](std::size_t r, std::size_t c) { return costs(r, c); });
    for (std::size_t r = 0; r < rows; ++r) result.pairs.emplace_back(r, col_of_row[r]);
  } else {
    const auto row_of_col =
        solve_wide(cols, rows, [&](std::size_t c, std::size_t r) { return costs(r, c); });
    for (std::size_t c = 0; c < cols; ++c) result.pairs.emplace_back(row_of_col[c], c);
    std::sort(result.pairs.begin(), result.pairs.end());
  }
  for (const auto& [r, c] : result.pairs) result.total_cost += costs(r, c);
  return result;
}

double matching_cost(const BoundingBox& gt_box, const InstancePrediction& pred,
                     const MatchWeights& w, const loss::FocalParams& focal) {
  return matching_cost(GroundTruthTarget{gt_box, std::nullopt}, pred, w, focal);
}

double matching_cost(const GroundTruthTarget& gt, const InstancePrediction& pred,
                     const MatchWeights& w, const loss::FocalParams& focal) {
  const double cls = loss::focal_loss(pred.class_prob, /*is_object=*/true, focal).value;
  const double giou = loss::giou(gt.box, pred.box).value;
  const double l1 = std::abs(gt.box.cx - pred.box.cx) + std::abs(gt.box.cy - pred.box.cy) +
                    std::abs(gt.box.w - pred.box.w) + std::abs(gt.box.h - pred.box.h);
  double cost = w.lambda_cls * cls + w.lambda_iou * (1.0 - giou) + w.lambda_l1 * l1;
  if (w.lambda_polygon != 0.0) {
    if (!gt.polygon) {
      throw Error(ErrorCode::kInvalidArgument, "polygon matching term needs a gt polygon");
    }
    cost += w.lambda_polygon * loss::polygon_l1(*gt.polygon, pred.polygon).value;
  }
  return cost;
}

Assignment match_instances(std::span<const BoundingBox> gts,
                           std::span<const InstancePrediction> preds, const MatchWeights& w,
                           const loss::FocalParams& focal) {
  std::vector<GroundTruthTarget> targets;
  targets.reserve(gts.size());
  for (const BoundingBox& box : gts) targets.push_back({box, std::nullopt});
  return match_instances(std::span<const GroundTruthTarget>(targets), preds, w, focal);
}

Assignment match_instances(std::span<const GroundTruthTarget> gts,
                           std::span<const InstancePrediction> preds, const MatchWeights& w,
                           const loss::FocalParams& focal) {
  if (preds.empty()) throw Error(ErrorCode::kInvalidArgument, "no predictions to match");
  CostMatrix costs(gts.size(), preds.size());
  for (std::size_t r = 0; r < gts.size(); ++r) {
    for (std::size_t c = 0; c < preds.size(); ++c) {
      costs(r, c) = matching_cost(gts[r], preds[c], w, focal);
    }
  }
  return solve(costs);
}

}  // namespace polyenc
