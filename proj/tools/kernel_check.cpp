// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernel_check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "polyenc/deformable_attention.hpp"
#include "polyenc/error.hpp"
#include "polyenc/losses.hpp"
#include "polyenc/random.hpp"

namespace polyenc::cli {

namespace {

using namespace polyenc::attention;

constexpr std::size_t kHeadDim = 4;
constexpr double kFdStep = 1e-5;
constexpr double kFdTolerance = 1e-4;

struct Tracker {
  PropertyResult result;
  double limit;

  Tracker(std::string name, double tolerance) : result{std::move(name), true, 0.0}, limit(tolerance) {}
  void observe(double violation) {
    result.worst = std::max(result.worst, violation);
    if (!(violation <= limit)) result.passed = false;
  }
};

FeaturePyramid random_pyramid(Rng& rng, const AttentionShape& shape) {
  FeaturePyramid pyramid;
  const std::size_t channels = shape.heads * kHeadDim;
  for (std::size_t l = 0; l < shape.levels; ++l) {
    const std::size_t side = std::size_t{16} >> std::min<std::size_t>(l, 3);  // 16, 8, 4, 2, 2, ...
    FeatureGrid grid(side, side, channels);
    for (double& v : grid.values()) v = rng.uniform(-1.0, 1.0);
    pyramid.levels.push_back(std::move(grid));
  }
  return pyramid;
}

Matrix random_matrix(Rng& rng, std::size_t n) {
  Matrix m{n, n, std::vector<double>(n * n)};
  for (double& v : m.values) v = rng.uniform(-1.0, 1.0);
  return m;
}

std::vector<double> buggy_normalize(std::span<const double> raw) {
  double peak = *std::max_element(raw.begin(), raw.end());
  std::vector<double> out(raw.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) sum += out[i] = std::exp(raw[i] - peak);
  for (double& v : out) v /= sum;
  return out;
}

std::vector<Query> random_queries(Rng& rng, const AttentionShape& shape, bool buggy) {
  std::vector<Query> queries(3);
  for (Query& q : queries) {
    q.ref_point = {rng.uniform(), rng.uniform()};
    std::vector<double> raw(shape.slots());
    for (double& v : raw) v = rng.uniform(-3.0, 3.0);
    q.weights = buggy ? buggy_normalize(raw) : normalize_weights(raw, shape);
    q.offsets.resize(shape.slots());
    for (Point& o : q.offsets) o = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
  }
  return queries;
}

void check_attention(const KernelCheckOptions& opt, std::vector<PropertyResult>& results) {
  const AttentionShape shape{opt.heads, opt.levels, opt.points};
  const std::size_t channels = shape.heads * kHeadDim;
  Tracker identity("attention.identity", 0.0);
  Tracker linearity("attention.linearity", 1e-10);
  Tracker envelope("attention.convex_envelope", 0.0);
  Tracker normalization("attention.weight_normalization", 1e-12);

  for (std::size_t cfg = 0; cfg < opt.configurations; ++cfg) {
    Rng rng = Rng::derived(opt.seed, cfg);
    const FeaturePyramid pyramid = random_pyramid(rng, shape);

    // Identity: one unit weight per head on an exact cell center.
    {
      const AttentionParams params{shape, Matrix::identity(channels), Matrix::identity(channels)};
      Query q;
      const FeatureGrid& grid = pyramid.levels[0];
      const auto cx = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(grid.width()) - 1));
      const auto cy = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(grid.height()) - 1));
      q.ref_point = {(static_cast<double>(cx) + 0.5) / static_cast<double>(grid.width()),
                     (static_cast<double>(cy) + 0.5) / static_cast<double>(grid.height())};
      q.weights.assign(shape.slots(), 0.0);
      q.offsets.assign(shape.slots(), Point{0.0, 0.0});
      for (std::size_t m = 0; m < shape.heads; ++m) q.weights[shape.slot(m, 0, 0)] = 1.0;
      const auto out = msda_forward(pyramid, std::span<const Query>(&q, 1), params);
      const auto expected = grid.cell(cy, cx);
      double diff = 0.0;
      for (std::size_t c = 0; c < channels; ++c) diff = std::max(diff, std::abs(out[0][c] - expected[c]));
      identity.observe(diff);
    }

    const std::vector<Query> queries = random_queries(rng, shape, opt.inject_normalization_bug);
    for (const Query& q : queries) {
      for (std::size_t m = 0; m < shape.heads; ++m) {
        double sum = 0.0;
        for (std::size_t s = m * shape.levels * shape.points; s < (m + 1) * shape.levels * shape.points; ++s) {
          sum += q.weights[s];
          if (q.weights[s] < 0.0 || q.weights[s] > 1.0) normalization.observe(1.0);
        }
        normalization.observe(std::abs(sum - 1.0));
      }
    }

    // Linearity in the feature maps.
    {
      const AttentionParams params{shape, random_matrix(rng, channels), random_matrix(rng, channels)};
      const FeaturePyramid other = random_pyramid(rng, shape);
      const double alpha = rng.uniform(-2.0, 2.0), beta = rng.uniform(-2.0, 2.0);
      FeaturePyramid mixed = pyramid;
      for (std::size_t l = 0; l < shape.levels; ++l) {
        auto dst = mixed.levels[l].values();
        auto a = pyramid.levels[l].values();
        auto b = other.levels[l].values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = alpha * a[i] + beta * b[i];
      }
      const auto fa = msda_forward(pyramid, queries, params);
      const auto fb = msda_forward(other, queries, params);
      const auto fm = msda_forward(mixed, queries, params);
      for (std::size_t i = 0; i < queries.size(); ++i) {
        for (std::size_t c = 0; c < channels; ++c) {
          linearity.observe(std::abs(fm[i][c] - (alpha * fa[i][c] + beta * fb[i][c])));
        }
      }
    }

    // Convex envelope: with identity projections each channel stays within
    // [min(0, min feature), max(0, max feature)] (zero padding contributes 0).
    {
      const AttentionParams params{shape, Matrix::identity(channels), Matrix::identity(channels)};
      std::vector<double> lo(channels, 0.0), hi(channels, 0.0);
      for (const FeatureGrid& grid : pyramid.levels) {
        auto values = grid.values();
        for (std::size_t i = 0; i < values.size(); ++i) {
          lo[i % channels] = std::min(lo[i % channels], values[i]);
          hi[i % channels] = std::max(hi[i % channels], values[i]);
        }
      }
      const auto out = msda_forward(pyramid, queries, params);
      for (const auto& row : out) {
        for (std::size_t c = 0; c < channels; ++c) {
          envelope.observe(std::max({0.0, lo[c] - row[c], row[c] - hi[c]}));
        }
      }
    }
  }
  for (Tracker* t : {&identity, &linearity, &envelope, &normalization}) results.push_back(t->result);
}

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-3});
}

double central_difference(const std::function<double(double)>& f, double x) {
  return (f(x + kFdStep) - f(x - kFdStep)) / (2.0 * kFdStep);
}

void check_gradients(const KernelCheckOptions& opt, std::vector<PropertyResult>& results) {
  Tracker focal("grad.focal", kFdTolerance);
  Tracker giou("grad.giou", kFdTolerance);
  Tracker l1("grad.l1", kFdTolerance);
  Tracker poly("grad.polygon_l1", kFdTolerance);
  Tracker bce("grad.corner_bce", kFdTolerance);

  Rng rng = Rng::derived(opt.seed, 0xf00d);
  for (std::size_t trial = 0; trial < opt.configurations; ++trial) {
    {
      const double p = rng.uniform(0.01, 0.99);
      const bool object = rng.uniform() < 0.5;
      const double numeric = central_difference([&](double x) { return loss::focal_loss(x, object).value; }, p);
      focal.observe(relative_error(loss::focal_loss(p, object).grad, numeric));
    }
    {
      auto box = [&] { return BoundingBox{rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8), rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5)}; };
      const BoundingBox a = box(), b = box();
      const auto analytic = loss::giou(a, b);
      for (int side = 0; side < 2; ++side) {
        for (int k = 0; k < 4; ++k) {
          auto f = [&](double x) {
            BoundingBox pa = a, pb = b;
            BoundingBox& target = side == 0 ? pa : pb;
            double* fields[] = {&target.cx, &target.cy, &target.w, &target.h};
            *fields[k] = x;
            return loss::giou(pa, pb).value;
          };
          const BoundingBox& src = side == 0 ? a : b;
          const double at[] = {src.cx, src.cy, src.w, src.h};
          const double g = (side == 0 ? analytic.grad_a : analytic.grad_b)[static_cast<std::size_t>(k)];
          giou.observe(relative_error(g, central_difference(f, at[k])));
        }
      }
    }
    {
      std::vector<double> a(6), b(6);
      for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.uniform(-1.0, 1.0);
        do b[i] = rng.uniform(-1.0, 1.0); while (std::abs(a[i] - b[i]) < 1e-3);
      }
      const auto analytic = loss::l1_seq(a, b);
      for (std::size_t i = 0; i < a.size(); ++i) {
        auto f = [&](double x) {
          std::vector<double> pa = a;
          pa[i] = x;
          return loss::l1_seq(pa, b).value;
        };
        l1.observe(relative_error(analytic.grad_a[i], central_difference(f, a[i])));
      }
    }
    {
      EncodedPolygon gt, pred;
      for (int i = 0; i < 8; ++i) {
        gt.coords.push_back({rng.uniform(0.0, 300.0), rng.uniform(0.0, 300.0)});
        pred.coords.push_back({gt.coords.back().x + rng.uniform(0.01, 5.0) * (rng.uniform() < 0.5 ? -1 : 1),
                               gt.coords.back().y + rng.uniform(0.01, 5.0) * (rng.uniform() < 0.5 ? -1 : 1)});
      }
      const auto analytic = loss::polygon_l1(gt, pred);
      for (std::size_t i = 0; i < 2 * pred.size(); ++i) {
        auto f = [&](double x) {
          EncodedPolygon p = pred;
          (i % 2 == 0 ? p.coords[i / 2].x : p.coords[i / 2].y) = x;
          return loss::polygon_l1(gt, p).value;
        };
        const double at = i % 2 == 0 ? pred.coords[i / 2].x : pred.coords[i / 2].y;
        poly.observe(relative_error(analytic.grad_b[i], central_difference(f, at)));
      }
    }
    {
      std::vector<double> flags(8), probs(8);
      for (std::size_t i = 0; i < flags.size(); ++i) {
        flags[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
        probs[i] = rng.uniform(0.01, 0.99);
      }
      const auto analytic = loss::corner_bce(flags, probs);
      for (std::size_t i = 0; i < flags.size(); ++i) {
        auto f = [&](double x) {
          std::vector<double> p = probs;
          p[i] = x;
          return loss::corner_bce(flags, p).value;
        };
        bce.observe(relative_error(analytic.grad[i], central_difference(f, probs[i])));
      }
    }
  }
  for (Tracker* t : {&focal, &giou, &l1, &poly, &bce}) results.push_back(t->result);
}

}  // namespace

std::vector<PropertyResult> run_kernel_checks(const KernelCheckOptions& options) {
  if (options.heads == 0 || options.levels == 0 || options.points == 0 || options.configurations == 0) {
    throw Error(ErrorCode::kInvalidArgument, "heads, levels, points and configurations must be positive");
  }
  std::vector<PropertyResult> results;
  check_attention(options, results);
  check_gradients(options, results);
  return results;
}

}  // namespace polyenc::cli
