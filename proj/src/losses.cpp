// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyenc/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "polyenc/assignment.hpp"
#include "polyenc/error.hpp"

namespace polyenc::loss {

namespace {

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

// Corner-form box and its gradient slots, ordered (x1, y1, x2, y2).
struct Corners {
  double x1, y1, x2, y2;
};

Corners to_corners(const BoundingBox& b) {
  return {b.cx - b.w / 2.0, b.cy - b.h / 2.0, b.cx + b.w / 2.0, b.cy + b.h / 2.0};
}

BoxGrad to_center_grad(const std::array<double, 4>& g) {
  return {g[0] + g[2], g[1] + g[3], 0.5 * (g[2] - g[0]), 0.5 * (g[3] - g[1])};
}

}  // namespace

ScalarGrad focal_loss(double p_hat, bool is_object, const FocalParams& fp) {
  const double p = clamp_prob(p_hat);
  const bool clamped = p != p_hat;
  const double a = fp.alpha;
  const double g = fp.gamma;
  ScalarGrad out;
  if (is_object) {
    const double q = 1.0 - p;
    const double qg = std::pow(q, g);
    out.value = -a * qg * std::log(p);
    const double dqg = g == 0.0 ? 0.0 : g * std::pow(q, g - 1.0);
    out.grad = a * dqg * std::log(p) - a * qg / p;
  } else {
    const double pg = std::pow(p, g);
    out.value = -(1.0 - a) * pg * std::log(1.0 - p);
    const double dpg = g == 0.0 ? 0.0 : g * std::pow(p, g - 1.0);
    out.grad = -(1.0 - a) * (dpg * std::log(1.0 - p) - pg / (1.0 - p));
  }
  if (clamped) out.grad = 0.0;
  return out;
}

GiouResult giou(const BoundingBox& box_a, const BoundingBox& box_b) {
  if (!(box_a.w > 0.0 && box_a.h > 0.0 && box_b.w > 0.0 && box_b.h > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "giou needs boxes with positive size");
  }
  const Corners a = to_corners(box_a);
  const Corners b = to_corners(box_b);

  const double iw_raw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih_raw = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double iw = std::max(0.0, iw_raw);
  const double ih = std::max(0.0, ih_raw);
  const double inter = iw * ih;
  const double area_a = (a.x2 - a.x1) * (a.y2 - a.y1);
  const double area_b = (b.x2 - b.x1) * (b.y2 - b.y1);
  const double uni = area_a + area_b - inter;
  const double cw = std::max(a.x2, b.x2) - std::min(a.x1, b.x1);
  const double ch = std::max(a.y2, b.y2) - std::min(a.y1, b.y1);
  const double enclosing = cw * ch;

  GiouResult out;
  out.value = inter / uni - (enclosing - uni) / enclosing;

  // Partials of GIoU = I/U + U/C - 1 with U = Aa + Ab - I.
  const double d_inter = (uni + inter) / (uni * uni) - 1.0 / enclosing;
  const double d_area = -inter / (uni * uni) + 1.0 / enclosing;
  const double d_encl = -uni / (enclosing * enclosing);

  const double d_iw = iw_raw > 0.0 ? d_inter * ih : 0.0;
  const double d_ih = ih_raw > 0.0 ? d_inter * iw : 0.0;
  const double d_cw = d_encl * ch;
  const double d_ch = d_encl * cw;

  std::array<double, 4> ga{}, gb{};  // (x1, y1, x2, y2)
  // Own-area terms.
  ga[0] -= d_area * (a.y2 - a.y1);
  ga[2] += d_area * (a.y2 - a.y1);
  ga[1] -= d_area * (a.x2 - a.x1);
  ga[3] += d_area * (a.x2 - a.x1);
  gb[0] -= d_area * (b.y2 - b.y1);
  gb[2] += d_area * (b.y2 - b.y1);
  gb[1] -= d_area * (b.x2 - b.x1);
  gb[3] += d_area * (b.x2 - b.x1);
  // Intersection: min of the far edges, max of the near edges.
  (a.x2 <= b.x2 ? ga[2] : gb[2]) += d_iw;
  (a.x1 >= b.x1 ? ga[0] : gb[0]) -= d_iw;
  (a.y2 <= b.y2 ? ga[3] : gb[3]) += d_ih;
  (a.y1 >= b.y1 ? ga[1] : gb[1]) -= d_ih;
  // Enclosing box: max of the far edges, min of the near edges.
  (a.x2 >= b.x2 ? ga[2] : gb[2]) += d_cw;
  (a.x1 <= b.x1 ? ga[0] : gb[0]) -= d_cw;
  (a.y2 >= b.y2 ? ga[3] : gb[3]) += d_ch;
  (a.y1 <= b.y1 ? ga[1] : gb[1]) -= d_ch;

  out.grad_a = to_center_grad(ga);
  out.grad_b = to_center_grad(gb);
  return out;
}

SeqGrad l1_seq(std::span<const double> a, std::span<const double> b) {
  check_lengths(a.size(), b.size(), "l1_seq");
  SeqGrad out;
  out.grad_a.resize(a.size());
  out.grad_b.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    out.value += std::abs(d);
    const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    out.grad_a[i] = s;
    out.grad_b[i] = -s;
  }
  return out;
}

SeqGrad polygon_l1(const EncodedPolygon& gt, const EncodedPolygon& pred) {
  check_lengths(gt.size(), pred.size(), "polygon_l1");
  auto flatten = [](const EncodedPolygon& poly) {
    std::vector<double> flat;
    flat.reserve(2 * poly.size());
    for (const Point& p : poly.coords) {
      flat.push_back(p.x);
      flat.push_back(p.y);
    }
    return flat;
  };
  const std::vector<double> a = flatten(gt);
  const std::vector<double> b = flatten(pred);
  return l1_seq(a, b);
}

VectorGrad corner_bce(std::span<const double> gt_flags, std::span<const double> pred_probs) {
  check_lengths(gt_flags.size(), pred_probs.size(), "corner_bce");
  VectorGrad out;
  out.grad.resize(gt_flags.size());
  for (std::size_t i = 0; i < gt_flags.size(); ++i) {
    const double c = gt_flags[i];
    const double p = clamp_prob(pred_probs[i]);
    out.value += -c * std::log(p) - (1.0 - c) * std::log(1.0 - p);
    out.grad[i] = p == pred_probs[i] ? -c / p + (1.0 - c) / (1.0 - p) : 0.0;
  }
  return out;
}

double total_loss(const LossTerms& t, const LossWeights& w) {
  const double bbox = w.lambda_iou * t.iou + w.lambda_l1 * t.l1;
  return w.lambda_cls * t.cls + bbox + w.lambda_poly * t.poly + w.lambda_cnr * t.cnr;
}

double deep_supervision(std::span<const double> layer_losses) {
  if (layer_losses.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "deep supervision needs at least one layer");
  }
  return std::accumulate(layer_losses.begin(), layer_losses.end(), 0.0);
}

LossTerms compute_terms(std::span<const GroundTruthTarget> gts,
                        std::span<const InstancePrediction> preds, const Assignment& matching,
                        const FocalParams& fp) {
  std::vector<char> matched(preds.size(), 0);
  LossTerms terms;
  for (const auto& [row, col] : matching.pairs) {
    if (row >= gts.size() || col >= preds.size()) {
      throw Error(ErrorCode::kSizeMismatch, "matching refers to a missing instance");
    }
    matched[col] = 1;
    const GroundTruthTarget& gt = gts[row];
    const InstancePrediction& pred = preds[col];
    terms.iou += 1.0 - giou(gt.box, pred.box).value;
    terms.l1 += std::abs(gt.box.cx - pred.box.cx) + std::abs(gt.box.cy - pred.box.cy) +
                std::abs(gt.box.w - pred.box.w) + std::abs(gt.box.h - pred.box.h);
    if (gt.polygon) {
      terms.poly += polygon_l1(*gt.polygon, pred.polygon).value;
      terms.cnr += corner_bce(gt.polygon->corner_flags, pred.polygon.corner_flags).value;
    }
  }
  for (std::size_t i = 0; i < preds.size(); ++i) {
    terms.cls += focal_loss(preds[i].class_prob, matched[i] != 0, fp).value;
  }
  return terms;
}

}  // namespace polyenc::loss
