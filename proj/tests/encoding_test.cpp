// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "polyenc/encoding.hpp"
#include "polyenc/error.hpp"

using namespace polyenc;

namespace {

const Ring kSquare({{0, 0}, {10, 0}, {10, 10}, {0, 10}});

Ring regular(int n, double radius, Point c = {50, 50}) {
  std::vector<Point> pts;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    pts.push_back({c.x + radius * std::cos(t), c.y + radius * std::sin(t)});
  }
  return Ring(pts);
}

std::size_t ones(const std::vector<double>& flags) {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1.0));
}

}  // namespace

TEST(UniformSample, SquareEightSamples) {
  const auto s = uniform_sample(kSquare, 8);
  const std::vector<Point> expected = {{0, 0}, {5, 0}, {10, 0}, {10, 5}, {10, 10}, {5, 10}, {0, 10}, {0, 5}};
  EXPECT_EQ(s, expected);
}

TEST(UniformSample, VertexCountEqualsM) {
  const Ring hex = regular(6, 10);
  const auto s = uniform_sample(hex, 6);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(s[i].x, hex[i].x, 1e-9);
    EXPECT_NEAR(s[i].y, hex[i].y, 1e-9);
  }
}

TEST(UniformSample, TooManyCorners) {
  try {
    uniform_sample(regular(12, 10), 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooManyCorners);
  }
}

TEST(UniformSample, SpacingIsEqualOnRandomRings) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Ring r(oracle::random_star(rng, {0, 0}, 5, 20, 5));
    const auto s = uniform_sample(r, 40);
    ASSERT_EQ(s.size(), 40u);
    EXPECT_EQ(s[0], r[0]);
  }
}

TEST(SnapCorners, SquareCornersLandInPlace) {
  const auto samples = uniform_sample(kSquare, 8);
  const auto snapped = snap_corners(samples, kSquare.vertices());
  EXPECT_EQ(snapped.corner_indices, (std::vector<std::size_t>{0, 2, 4, 6}));
  EXPECT_EQ(snapped.points, samples);
  EXPECT_DOUBLE_EQ(snapped.cost, 0.0);
}

TEST(SnapCorners, SingleCornerTakesNearestSample) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 100);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point> samples(20);
    for (Point& p : samples) p = {u(rng), u(rng)};
    const Point corner{u(rng), u(rng)};
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
      if (distance(samples[i], corner) < distance(samples[nearest], corner)) nearest = i;
    }
    const auto snapped = snap_corners(samples, std::vector<Point>{corner});
    EXPECT_EQ(snapped.corner_indices, std::vector<std::size_t>{nearest});
    EXPECT_EQ(snapped.points[nearest], corner);
  }
}

TEST(SnapCorners, CostMatchesBruteForce) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0, 100);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point> samples(8), corners(4);
    for (Point& p : samples) p = {u(rng), u(rng)};
    for (Point& p : corners) p = {u(rng), u(rng)};
    CostMatrix costs(4, 8);
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 8; ++c) costs(r, c) = distance(corners[r], samples[c]);
    }
    EXPECT_NEAR(snap_corners(samples, corners).cost, oracle::brute_force_assignment(costs), 1e-9);
  }
}

TEST(SimplifyTo, NoOpWhenSmallEnough) { EXPECT_EQ(simplify_to(kSquare, 4), kSquare); }

TEST(SimplifyTo, EqualEdgesCollapseFirstEdge) {
  const Ring hex = regular(6, 10);
  const Ring five = simplify_to(hex, 5);
  ASSERT_EQ(five.size(), 5u);
  EXPECT_NEAR(five[0].x, 0.5 * (hex[0].x + hex[1].x), 1e-12);
  EXPECT_NEAR(five[0].y, 0.5 * (hex[0].y + hex[1].y), 1e-12);
  for (std::size_t i = 1; i < 5; ++i) EXPECT_EQ(five[i], hex[i + 1]);
}

TEST(SimplifyTo, NotchEdgeGoesFirst) {
  // 40x20 rectangle with a 1 px step on its top side.
  const Ring notched({{0, 0}, {20, 0}, {20, 1}, {40, 1}, {40, 20}, {0, 20}});
  const Ring r = simplify_to(notched, 5);
  ASSERT_EQ(r.size(), 5u);
  EXPECT_EQ(r[1], (Point{20, 0.5}));
  EXPECT_EQ(simplify_to(notched, 4).size(), 4u);
}

TEST(EncodeUniform, Square) {
  const auto e = encode_uniform(kSquare, {8, false});
  EXPECT_EQ(e.size(), 8u);
  EXPECT_EQ(ones(e.corner_flags), 4u);
  for (const Point& c : kSquare.vertices()) {
    EXPECT_NE(std::find(e.coords.begin(), e.coords.end(), c), e.coords.end());
  }
  const auto p1 = encode_uniform(kSquare, {8, true});
  EXPECT_EQ(p1.coords, e.coords);
  EXPECT_EQ(ones(p1.corner_flags), 8u);
}

TEST(EncodeUniform, HundredGonIsSimplified) {
  const auto e = encode_uniform(regular(100, 40), {96, false});
  EXPECT_EQ(ones(e.corner_flags), 96u);
}

TEST(EncodeUniform, CornersAlwaysPresent) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Ring r = canonicalize(Ring(oracle::random_star(rng, {100, 100}, 10, 60, 3 + trial % 20)));
    const auto e = encode_uniform(r, {});
    ASSERT_EQ(e.size(), 96u);
    EXPECT_EQ(ones(e.corner_flags), r.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e.corner_flags[i] == 1.0) {
        EXPECT_NE(std::find(r.vertices().begin(), r.vertices().end(), e.coords[i]), r.vertices().end());
      }
    }
  }
}

TEST(EncodeZeropad, Square) {
  const auto e = encode_zeropad(kSquare, {8, false});
  EXPECT_EQ(e.corner_flags, (std::vector<double>{1, 1, 1, 1, 0, 0, 0, 0}));
  for (std::size_t i = 4; i < 8; ++i) EXPECT_EQ(e.coords[i], (Point{0, 0}));
  EXPECT_EQ(ones(encode_zeropad(kSquare, {4, false}).corner_flags), 4u);
  EXPECT_EQ(ones(encode_zeropad(regular(100, 40), {96, false}).corner_flags), 96u);
}

TEST(Encoding, RejectsTinyM) {
  EXPECT_THROW(encode_uniform(kSquare, {3, false}), Error);
  EXPECT_THROW(encode_zeropad(kSquare, {2, false}), Error);
}
