// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "polyenc/error.hpp"
#include "polyenc/metrics.hpp"

using namespace polyenc;
using namespace polyenc::metrics;

namespace {

Ring rect(double x0, double y0, double x1, double y1) { return Ring({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}); }

Ring rotated_square(Point c, double half, double degrees) {
  const double t = degrees * std::numbers::pi / 180.0;
  std::vector<Point> pts;
  for (const Point& p : std::vector<Point>{{-half, -half}, {half, -half}, {half, half}, {-half, half}}) {
    pts.push_back({c.x + std::cos(t) * p.x - std::sin(t) * p.y, c.y + std::sin(t) * p.x + std::cos(t) * p.y});
  }
  return Ring(pts);
}

Ring with_midpoints(const Ring& r) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < r.size(); ++i) {
    pts.push_back(r[i]);
    pts.push_back(0.5 * (r[i] + r[(i + 1) % r.size()]));
  }
  return Ring(pts);
}

}  // namespace

TEST(CocoApAr, PerfectSinglePrediction) {
  const std::vector<GtInstance> gts = {{1, rect(10, 10, 30, 30)}};
  const std::vector<PredInstance> preds = {{1, rect(10, 10, 30, 30), 0.9}};
  const EvalContext ctx(gts, preds, {});
  const ApAr r = coco_ap_ar(ctx);
  for (double v : r.ap) EXPECT_DOUBLE_EQ(v, 1.0);
  for (double v : r.ar) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(CocoApAr, NoPredictions) {
  const std::vector<GtInstance> gts = {{1, rect(10, 10, 30, 30)}};
  const EvalContext ctx(gts, {}, {});
  const ApAr r = coco_ap_ar(ctx);
  for (double v : r.ap) EXPECT_EQ(v, 0.0);
  for (double v : r.ar) EXPECT_EQ(v, 0.0);
}

TEST(CocoApAr, ThresholdsSplitPartialMatches) {
  // IoU 0.7 and 0.55 by pixel count.
  const std::vector<GtInstance> gts = {{1, rect(0, 0, 10, 10)}, {1, rect(50, 50, 70, 70)}};
  const std::vector<PredInstance> preds = {{1, rect(0, 0, 10, 7), 0.8}, {1, rect(50, 50, 70, 61), 0.6}};
  const EvalContext ctx(gts, preds, {});
  EXPECT_DOUBLE_EQ(ctx.iou(0, 0), 0.7);
  EXPECT_DOUBLE_EQ(ctx.iou(1, 1), 0.55);
  const ApAr r = coco_ap_ar(ctx);
  EXPECT_DOUBLE_EQ(r.ap[0], 1.0);  // 0.50
  EXPECT_DOUBLE_EQ(r.ar[0], 1.0);
  EXPECT_DOUBLE_EQ(r.ar[1], 1.0);  // 0.55 still admits both
  EXPECT_DOUBLE_EQ(r.ar[2], 0.5);  // 0.60 drops the 0.55 pair
  EXPECT_DOUBLE_EQ(r.ap[5], 0.0);  // 0.75
  EXPECT_DOUBLE_EQ(r.ar[5], 0.0);
}

TEST(CocoApAr, EmptyGroundTruthPolicy) {
  const std::vector<PredInstance> preds = {{1, rect(0, 0, 10, 10), 0.5}};
  EXPECT_TRUE(std::isnan(coco_ap_ar(EvalContext({}, preds, {})).ap[0]));
  EvalConfig cfg;
  cfg.empty_as_perfect = true;
  EXPECT_EQ(coco_ap_ar(EvalContext({}, preds, cfg)).ap[0], 0.0);
  EXPECT_EQ(coco_ap_ar(EvalContext({}, {}, cfg)).ap[0], 1.0);
}

TEST(CocoApAr, FalsePositiveRankedFirstLowersPrecision) {
  const std::vector<GtInstance> gts = {{1, rect(0, 0, 10, 10)}};
  const std::vector<PredInstance> preds = {{1, rect(40, 40, 50, 50), 0.9}, {1, rect(0, 0, 10, 10), 0.5}};
  const ApAr r = coco_ap_ar(EvalContext(gts, preds, {}));
  EXPECT_DOUBLE_EQ(r.ap[0], 0.5);
  EXPECT_DOUBLE_EQ(r.ar[0], 1.0);
}

TEST(DatasetIou, Modes) {
  const std::vector<GtInstance> gts = {{1, rect(0, 0, 10, 10)}, {2, rect(0, 0, 10, 10)}};
  const std::vector<PredInstance> half = {{1, rect(5, 0, 15, 10), 1.0}, {2, rect(0, 0, 10, 10), 1.0}};
  EXPECT_NEAR(dataset_iou(EvalContext(gts, half, {})), (1.0 / 3.0 + 1.0) / 2.0, 1e-15);
  EvalConfig pooled;
  pooled.iou_mode = IouMode::kPooled;
  EXPECT_NEAR(dataset_iou(EvalContext(gts, half, pooled)), 150.0 / 250.0, 1e-15);
  EXPECT_EQ(dataset_iou(EvalContext(gts, {}, {})), 0.0);
  const std::vector<PredInstance> same = {{1, rect(0, 0, 10, 10), 1.0}, {2, rect(0, 0, 10, 10), 1.0}};
  EXPECT_EQ(dataset_iou(EvalContext(gts, same, {})), 1.0);
}

TEST(Mta, Examples) {
  const Ring sq = rotated_square({100, 100}, 30, 0);
  EXPECT_EQ(max_tangent_angle(sq, sq), 0.0);
  EXPECT_NEAR(max_tangent_angle(sq, rotated_square({100, 100}, 30, 10)), 10.0, 1e-6);
  EXPECT_NEAR(max_tangent_angle(sq, rotated_square({100, 100}, 30, 45)), 45.0, 1e-6);
  EXPECT_NEAR(max_tangent_angle(rotated_square({100, 100}, 30, 10), sq), 10.0, 1e-6);
}

TEST(Mta, ExtraCollinearVerticesDoNotMatter) {
  const Ring sq = rotated_square({100, 100}, 30, 0);
  EXPECT_EQ(max_tangent_angle(sq, with_midpoints(sq)), 0.0);
}

TEST(PairMetrics, NRatioAndCIou) {
  const std::vector<GtInstance> gts = {{1, rect(0, 0, 20, 20)}, {1, rect(40, 40, 60, 60)}};
  const std::vector<PredInstance> doubled = {{1, with_midpoints(rect(0, 0, 20, 20)), 0.9},
                                             {1, with_midpoints(rect(40, 40, 60, 60)), 0.8}};
  EvalContext ctx(gts, doubled, {});
  auto pairs = match_pairs(ctx);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_DOUBLE_EQ(n_ratio(ctx, pairs), 2.0);

  const std::vector<PredInstance> triangles = {{1, Ring({{0, 0}, {20, 0}, {0, 20}}), 0.9},
                                               {1, Ring({{40, 40}, {60, 40}, {40, 60}}), 0.8}};
  EvalConfig loose;
  loose.match_iou = 0.4;
  EvalContext tri(gts, triangles, loose);
  EXPECT_DOUBLE_EQ(n_ratio(tri, match_pairs(tri)), 0.75);
  EXPECT_TRUE(std::isnan(n_ratio(ctx, {})));

  EXPECT_DOUBLE_EQ(complexity_aware_iou(4, 12, 0.9), 0.45);
  EXPECT_DOUBLE_EQ(complexity_aware_iou(7, 7, 0.37), 0.37);
  // Per-pair C-IoU averages over ground truths: unmatched ones count zero.
  const double both = c_iou(ctx, pairs);
  EXPECT_NEAR(both, (1.0 - 4.0 / 12.0), 1e-12);
  pairs.pop_back();
  EXPECT_NEAR(c_iou(ctx, pairs), both / 2.0, 1e-12);
}

TEST(PairMetrics, PerImageCIou) {
  const std::vector<GtInstance> gts = {{1, rect(0, 0, 20, 20)}, {2, rect(0, 0, 20, 20)}};
  const std::vector<PredInstance> preds = {{1, rect(0, 0, 20, 20), 0.9}, {2, rect(0, 0, 20, 10), 0.9}};
  EvalConfig cfg;
  cfg.c_iou_mode = CIouMode::kPerImage;
  EvalContext ctx(gts, preds, cfg);
  EXPECT_NEAR(c_iou(ctx, match_pairs(ctx)), (1.0 + 0.5) / 2.0, 1e-15);
}

TEST(Evaluate, ConsistentWithStandaloneOps) {
  const std::vector<GtInstance> gts = {{1, rect(0, 0, 20, 20)}, {1, rect(40, 40, 70, 60)}, {2, rect(5, 5, 50, 25)}};
  const std::vector<PredInstance> preds = {{1, rect(1, 0, 21, 20), 0.9},
                                           {1, with_midpoints(rect(40, 42, 70, 60)), 0.7},
                                           {2, rotated_square({27, 15}, 10, 5), 0.6},
                                           {2, rect(80, 80, 90, 90), 0.95}};
  const EvalConfig cfg;
  const EvalReport r = evaluate(gts, preds, cfg);
  const EvalContext ctx(gts, preds, cfg);
  const ApAr apar = coco_ap_ar(ctx);
  const auto pairs = match_pairs(ctx);
  double ap = 0, ar = 0;
  for (std::size_t i = 0; i < apar.ap.size(); ++i) {
    ap += apar.ap[i] / 10.0;
    ar += apar.ar[i] / 10.0;
  }
  EXPECT_NEAR(r.ap, 100 * ap, 1e-9);
  EXPECT_NEAR(r.ar, 100 * ar, 1e-9);
  EXPECT_NEAR(r.ap50, 100 * apar.ap[0], 1e-12);
  EXPECT_NEAR(r.ap75, 100 * apar.ap[5], 1e-12);
  EXPECT_NEAR(r.iou, 100 * dataset_iou(ctx), 1e-12);
  EXPECT_NEAR(r.mta_degrees, mta(ctx, pairs), 1e-12);
  EXPECT_NEAR(r.n_ratio, n_ratio(ctx, pairs), 1e-12);
  EXPECT_NEAR(r.c_iou, 100 * c_iou(ctx, pairs), 1e-12);
}

TEST(Evaluate, EmptyPredictions) {
  const std::vector<GtInstance> gts = {{1, rect(0, 0, 20, 20)}};
  const EvalReport r = evaluate(gts, {}, {});
  EXPECT_EQ(r.ap, 0.0);
  EXPECT_EQ(r.ar, 0.0);
  EXPECT_TRUE(std::isnan(r.mta_degrees));
}

TEST(FormatReport, KeysInOrder) {
  const std::vector<GtInstance> gts = {{1, rect(0, 0, 20, 20)}};
  const EvalConfig cfg;
  const std::string text = format_report(evaluate(gts, {}, cfg), cfg);
  std::size_t pos = 0;
  for (const char* key : {"AP:", "AP50:", "AP75:", "AR:", "AR50:", "AR75:", "IoU:", "MTA:", "N_ratio:", "C_IoU:"}) {
    const std::size_t at = text.find(std::string("\n") + key, pos);
    ASSERT_NE(at, std::string::npos) << key;
    pos = at + 1;
  }
  EXPECT_NE(text.find("MTA: nan"), std::string::npos);
  EXPECT_NE(text.find("AP: 0.000000"), std::string::npos);
}

TEST(EvalContext, RejectsNonFiniteScores) {
  const std::vector<PredInstance> preds = {{1, rect(0, 0, 10, 10), NAN}};
  EXPECT_THROW(EvalContext({}, preds, {}), Error);
}
