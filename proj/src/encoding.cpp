// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyenc/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polyenc/assignment.hpp"
#include "polyenc/error.hpp"

namespace polyenc {

namespace {

void check_config(const EncodingConfig& cfg) {
  if (cfg.m < 4) {
    throw Error(ErrorCode::kInvalidArgument, "encoding needs m >= 4, got " + std::to_string(cfg.m));
  }
}

// Canonical ring with at most m vertices.
Ring prepare(const Ring& ring, std::size_t m) {
  Ring canonical = canonicalize(ring);
  if (canonical.size() > m) canonical = canonicalize(simplify_to(canonical, m));
  return canonical;
}

}  // namespace

std::vector<Point> uniform_sample(const Ring& ring, std::size_t m) {
  const auto& v = ring.vertices();
  const std::size_t n = v.size();
  if (n > m) {
    throw Error(ErrorCode::kTooManyCorners, std::to_string(n) + " corners do not fit in " +
                                                std::to_string(m) + " samples");
  }
  std::vector<double> cumulative(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cumulative[i + 1] = cumulative[i] + distance(v[i], v[(i + 1) % n]);
  }
  const double total = cumulative[n];
  const double step = total / static_cast<double>(m);

  std::vector<Point> samples;
  samples.reserve(m);
  std::size_t edge = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double s = static_cast<double>(k) * step;
    while (edge + 1 < n && cumulative[edge + 1] <= s) ++edge;
    const Point& a = v[edge];
    const Point& b = v[(edge + 1) % n];
    const double len = cumulative[edge + 1] - cumulative[edge];
    const double t = std::clamp((s - cumulative[edge]) / len, 0.0, 1.0);
    samples.push_back(t == 0.0 ? a : a + t * (b - a));
  }
  return samples;
}

SnapResult snap_corners(std::span<const Point> samples, std::span<const Point> corners) {
  if (corners.size() > samples.size()) {
    throw Error(ErrorCode::kSizeMismatch, std::to_string(corners.size()) + " corners but only " +
                                              std::to_string(samples.size()) + " samples");
  }
  CostMatrix costs(corners.size(), samples.size());
  for (std::size_t r = 0; r < corners.size(); ++r) {
    for (std::size_t c = 0; c < samples.size(); ++c) costs(r, c) = distance(corners[r], samples[c]);
  }
  const Assignment assignment = solve(costs);

  SnapResult result;
  result.points.assign(samples.begin(), samples.end());
  result.cost = assignment.total_cost;
  for (const auto& [row, col] : assignment.pairs) {
    result.points[col] = corners[row];
    result.corner_indices.push_back(col);
  }
  std::sort(result.corner_indices.begin(), result.corner_indices.end());
  return result;
}

Ring simplify_to(const Ring& ring, std::size_t m) {
  std::vector<Point> v = ring.vertices();
  while (v.size() > m) {
    if (v.size() <= 3) {
      throw Error(ErrorCode::kZeroArea, "simplification below 3 vertices");
    }
    const std::size_t n = v.size();
    std::size_t shortest = 0;
    double shortest_len = distance(v[0], v[1]);
    for (std::size_t i = 1; i < n; ++i) {
      const double len = distance(v[i], v[(i + 1) % n]);
      // Edges equal up to rounding count as ties and keep the lower index.
      if (len < shortest_len - 1e-9 * std::max(1.0, shortest_len)) {
        shortest = i;
        shortest_len = len;
      }
    }
    const std::size_t next = (shortest + 1) % n;
    const Point mid = 0.5 * (v[shortest] + v[next]);
    if (next == 0) {
      v[0] = mid;
      v.pop_back();
    } else {
      v[shortest] = mid;
      v.erase(v.begin() + static_cast<std::ptrdiff_t>(next));
    }
  }
  return Ring(std::move(v));
}

EncodedPolygon encode_uniform(const Ring& ring, const EncodingConfig& cfg) {
  check_config(cfg);
  const Ring canonical = prepare(ring, cfg.m);
  const std::vector<Point> samples = uniform_sample(canonical, cfg.m);
  SnapResult snapped = snap_corners(samples, canonical.vertices());

  EncodedPolygon out;
  out.scheme = Scheme::kUniformSampling;
  out.coords = std::move(snapped.points);
  out.corner_flags.assign(cfg.m, cfg.phase1_labels ? 1.0 : 0.0);
  for (std::size_t idx : snapped.corner_indices) out.corner_flags[idx] = 1.0;
  return out;
}

EncodedPolygon encode_zeropad(const Ring& ring, const EncodingConfig& cfg) {
  check_config(cfg);
  const Ring canonical = prepare(ring, cfg.m);

  EncodedPolygon out;
  out.scheme = Scheme::kZeroPad;
  out.coords = canonical.vertices();
  out.coords.resize(cfg.m, Point{0.0, 0.0});
  out.corner_flags.assign(cfg.m, 0.0);
  std::fill_n(out.corner_flags.begin(), canonical.size(), 1.0);
  return out;
}

}  // namespace polyenc
