// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "polyenc/encoding.hpp"
#include "polyenc/error.hpp"
#include "polyenc/refinement.hpp"

using namespace polyenc;

namespace {

EncodedPolygon with_flags(std::vector<double> flags, Scheme scheme = Scheme::kUniformSampling) {
  EncodedPolygon p;
  p.scheme = scheme;
  for (std::size_t i = 0; i < flags.size(); ++i) p.coords.push_back({static_cast<double>(i), static_cast<double>(i * i)});
  p.corner_flags = std::move(flags);
  return p;
}

}  // namespace

TEST(Nms, Examples) {
  EXPECT_EQ(nms_1d_circular(std::vector<double>{0.1, 0.9, 0.8, 0.05, 0.7, 0.6}, 1),
            (std::vector<std::size_t>{1, 4}));
  EXPECT_EQ(nms_1d_circular(std::vector<double>(10, 0.5), 2), std::vector<std::size_t>{0});
  EXPECT_EQ(nms_1d_circular(std::vector<double>{0.3}, 2), std::vector<std::size_t>{0});
  EXPECT_TRUE(nms_1d_circular(std::vector<double>{}, 2).empty());
}

TEST(Nms, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> level(0, 4);  // coarse scores force ties
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 30);
    const std::size_t window = 1 + static_cast<std::size_t>(trial % 4);
    std::vector<double> s(n);
    for (double& v : s) v = level(rng) / 4.0;
    const auto kept = nms_1d_circular(s, window);
    EXPECT_EQ(kept, oracle::brute_force_nms(s, window));
    // Survivors are pairwise farther apart than the window.
    for (std::size_t a = 0; a < kept.size(); ++a) {
      for (std::size_t b = a + 1; b < kept.size(); ++b) {
        const std::size_t d = kept[b] - kept[a];
        EXPECT_GT(std::min(d, n - d), std::min(window, n / 2));
      }
    }
  }
}

TEST(Refine, PerfectSquare) {
  const Ring square({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
  EXPECT_EQ(refine(encode_uniform(square, {8, false}), {0.1, 1, 3, true}), square);
  EXPECT_EQ(refine(encode_uniform(square, {96, false})), square);
}

TEST(Refine, AdjacentPairKeepsHigher) {
  std::vector<double> flags(12, 0.0);
  flags[3] = 1.0;
  flags[4] = 0.6;
  flags[5] = 0.7;
  flags[9] = 1.0;
  flags[0] = 0.9;
  const Ring r = refine(with_flags(flags), {0.1, 1, 3, true});
  const auto p = with_flags(flags);
  EXPECT_EQ(r, Ring({p.coords[0], p.coords[3], p.coords[5], p.coords[9]}));
}

TEST(Refine, FallbackTriangle) {
  const auto p = with_flags(std::vector<double>(8, 0.0));
  EXPECT_EQ(refine(p), Ring({p.coords[0], p.coords[1], p.coords[2]}));
}

TEST(Refine, FallbackUsesTopScoresInSequenceOrder) {
  const auto p = with_flags({0.01, 0.05, 0.0, 0.09, 0.0, 0.02});
  EXPECT_EQ(refine(p), Ring({p.coords[1], p.coords[3], p.coords[5]}));
}

TEST(Refine, ThresholdOnlyKeepsEveryCandidate) {
  const auto p = with_flags({0.9, 0.8, 0.0, 0.0, 0.7, 0.0});
  RefineConfig cfg;
  cfg.use_nms = false;
  EXPECT_EQ(refine(p, cfg).size(), 3u);
  EXPECT_EQ(refine(p).size(), 3u);  // fallback refills to 3
}

TEST(Refine, ValidatesConfig) {
  RefineConfig cfg;
  cfg.nms_window = 0;
  EXPECT_THROW(refine(with_flags({1, 1, 1, 1}), cfg), Error);
  cfg = {};
  cfg.min_vertices = 2;
  EXPECT_THROW(refine(with_flags({1, 1, 1, 1}), cfg), Error);
  cfg = {};
  cfg.score_threshold = 1.5;
  EXPECT_THROW(refine(with_flags({1, 1, 1, 1}), cfg), Error);
}

TEST(Refine, SubsetOfInputInOrder) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> flags(24);
    for (double& f : flags) f = u(rng) < 0.3 ? u(rng) : 0.0;
    const auto p = with_flags(flags);
    const Ring r = refine(p);
    EXPECT_GE(r.size(), 3u);
    std::size_t cursor = 0;
    for (const Point& v : r.vertices()) {
      while (cursor < p.coords.size() && !(p.coords[cursor] == v)) ++cursor;
      ASSERT_LT(cursor, p.coords.size());
    }
  }
}

TEST(RefineZeropad, Examples) {
  std::vector<double> flags(10, 0.05);
  std::fill_n(flags.begin(), 4, 0.9);
  auto p = with_flags(flags, Scheme::kZeroPad);
  EXPECT_EQ(refine_zeropad(p, 0.1).size(), 4u);
  EXPECT_EQ(refine_zeropad(with_flags(std::vector<double>(10, 0.9), Scheme::kZeroPad), 0.1).size(), 10u);

  std::vector<double> gap(10, 0.0);
  gap[0] = 0.9;
  gap[1] = 0.05;
  gap[2] = 0.9;
  gap[3] = 0.4;
  p = with_flags(gap, Scheme::kZeroPad);
  EXPECT_EQ(refine_zeropad(p, 0.1), Ring({p.coords[0], p.coords[2], p.coords[3]}));
  EXPECT_EQ(refine_any(p), refine_zeropad(p));
}

TEST(RefineZeropad, RoundTrip) {
  const Ring lshape({{0, 0}, {20, 0}, {20, 10}, {40, 10}, {40, 30}, {0, 30}});
  EXPECT_EQ(refine_zeropad(encode_zeropad(lshape, {}), 0.1), lshape);
}
