// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "polyenc/encoding.hpp"
#include "polyenc/geometry.hpp"

namespace polyenc {
struct Assignment;
struct GroundTruthTarget;
struct InstancePrediction;
}  // namespace polyenc

namespace polyenc::loss {

/// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before any log.
inline constexpr double kProbClamp = 1e-7;

struct FocalParams {
  double alpha = 0.25;
  double gamma = 2.0;
};

struct LossWeights {
  double lambda_cls = 2.0;
  double lambda_poly = 5.0;
  double lambda_cnr = 1.0;
  double lambda_iou = 2.0;
  double lambda_l1 = 5.0;
};

struct ScalarGrad {
  double value = 0.0;
  double grad = 0.0;
};

/// Per-instance focal term. Positive: -a (1-p)^g ln p.
/// Negative: -(1-a) p^g ln(1-p). `grad` is d value / d p.
ScalarGrad focal_loss(double p_hat, bool is_object, const FocalParams& fp = {});

/// Gradient of a scalar with respect to (cx, cy, w, h).
using BoxGrad = std::array<double, 4>;

struct GiouResult {
  double value = 0.0;  ///< GIoU in [-1, 1]; the loss is 1 - value.
  BoxGrad grad_a{};
  BoxGrad grad_b{};
};

/// Generalized IoU of two center/size boxes. Throws Error(kInvalidArgument)
/// unless both widths and heights are positive.
GiouResult giou(const BoundingBox& a, const BoundingBox& b);

struct SeqGrad {
  double value = 0.0;
  std::vector<double> grad_a;
  std::vector<double> grad_b;
};

/// sum |a_i - b_i| with subgradient 0 at ties.
SeqGrad l1_seq(std::span<const double> a, std::span<const double> b);

/// L1 over the flattened (x0, y0, x1, y1, ...) coordinates. grad_a is with
/// respect to the ground truth, grad_b with respect to the prediction.
SeqGrad polygon_l1(const EncodedPolygon& gt, const EncodedPolygon& pred);

struct VectorGrad {
  double value = 0.0;
  std::vector<double> grad;
};

/// Binary cross entropy summed over vertices; grad is with respect to the
/// predicted probabilities.
VectorGrad corner_bce(std::span<const double> gt_flags, std::span<const double> pred_probs);

/// Unweighted components of the overall loss.
struct LossTerms {
  double cls = 0.0;
  double iou = 0.0;  ///< sum of (1 - GIoU) over matched pairs
  double l1 = 0.0;   ///< box L1 over matched pairs
  double poly = 0.0;
  double cnr = 0.0;
};

double total_loss(const LossTerms& terms, const LossWeights& w = {});

/// Sum of per-decoder-layer losses. Throws Error(kInvalidArgument) if empty.
double deep_supervision(std::span<const double> layer_losses);

/// Folds matched pairs into loss terms: focal over every prediction
/// (matched ones as objects, the rest as no-object); box, polygon and corner
/// terms over matched pairs only. Polygon and corner terms need gt polygons.
LossTerms compute_terms(std::span<const GroundTruthTarget> gts,
                        std::span<const InstancePrediction> preds,
                        const Assignment& matching, const FocalParams& fp = {});

}  // namespace polyenc::loss
