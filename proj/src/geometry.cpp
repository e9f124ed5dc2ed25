// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyenc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polyenc/error.hpp"

namespace polyenc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kZeroArea: return "ZeroArea";
    case ErrorCode::kTooManyCorners: return "TooManyCorners";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMalformedPolygon: return "MalformedPolygon";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Ring::Ring(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw Error(ErrorCode::kMalformedPolygon,
                "ring needs at least 3 vertices, got " + std::to_string(vertices_.size()));
  }
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = vertices_[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::kMalformedPolygon, "non-finite vertex " + std::to_string(i));
    }
    if (p == vertices_[(i + 1) % n]) {
      throw Error(ErrorCode::kMalformedPolygon,
                  "consecutive duplicate vertex at " + std::to_string(i));
    }
  }
}

Ring Ring::from_points_dedup(std::span<const Point> points) {
  std::vector<Point> out;
  out.reserve(points.size());
  for (const Point& p : points) {
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  while (out.size() > 1 && out.back() == out.front()) out.pop_back();
  return Ring(std::move(out));
}

Mask::Mask(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "mask dimensions must be positive");
  }
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Mask& Mask::operator|=(const Mask& other) {
  if (other.width_ != width_ || other.height_ != height_) {
    throw Error(ErrorCode::kDimensionMismatch, "mask union of different sizes");
  }
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
  return *this;
}

double signed_area(const Ring& ring) {
  const auto& v = ring.vertices();
  const std::size_t n = v.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    sum += a.x * b.y - b.x * a.y;
  }
  return 0.5 * sum;
}

double perimeter(const Ring& ring) {
  const auto& v = ring.vertices();
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) total += distance(v[i], v[(i + 1) % v.size()]);
  return total;
}

Ring canonicalize(const Ring& ring) {
  const double area = signed_area(ring);
  if (std::abs(area) < kZeroAreaTolerance) {
    throw Error(ErrorCode::kZeroArea, "degenerate ring (area " + std::to_string(area) + ")");
  }
  std::vector<Point> v = ring.vertices();
  if (area < 0.0) std::reverse(v.begin(), v.end());
  auto top = std::min_element(v.begin(), v.end(), [](const Point& a, const Point& b) {
    return a.y < b.y || (a.y == b.y && a.x < b.x);
  });
  std::rotate(v.begin(), top, v.end());
  return Ring(std::move(v));
}

namespace {

// > 0 when p lies left of a->b in a y-up frame, i.e. right of it on screen.
double is_left(Point a, Point b, Point p) {
  return (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
}

struct Crossing {
  double x;
  int dir;
};

}  // namespace

int winding_number(const Ring& ring, Point p) {
  const auto& v = ring.vertices();
  const std::size_t n = v.size();
  int wn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && is_left(a, b, p) > 0.0) ++wn;
    } else if (b.y <= p.y && is_left(a, b, p) < 0.0) {
      --wn;
    }
  }
  return wn;
}

Mask rasterize(const Ring& ring, int width, int height) {
  Mask mask(width, height);
  const auto& v = ring.vertices();
  const std::size_t n = v.size();

  double min_y = v[0].y, max_y = v[0].y;
  for (const Point& p : v) {
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const int row_begin = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
  const int row_end = std::min(height, static_cast<int>(std::ceil(max_y + 0.5)) + 1);

  std::vector<Crossing> crossings;
  for (int j = row_begin; j < row_end; ++j) {
    const double yc = j + 0.5;
    crossings.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = v[i];
      const Point& b = v[(i + 1) % n];
      int dir = 0;
      if (a.y <= yc && b.y > yc) dir = 1;
      else if (a.y > yc && b.y <= yc) dir = -1;
      if (dir == 0) continue;
      const double x = a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y);
      crossings.push_back({x, dir});
    }
    if (crossings.empty()) continue;
    std::sort(crossings.begin(), crossings.end(),
              [](const Crossing& l, const Crossing& r) { return l.x < r.x; });

    // Winding at a center between crossings k-1 and k is the sum of the
    // directions of crossings k.. (those to its right).
    std::vector<int> right_sum(crossings.size() + 1, 0);
    for (std::size_t k = crossings.size(); k-- > 0;) {
      right_sum[k] = right_sum[k + 1] + crossings[k].dir;
    }

    std::size_t k = 0;
    for (int i = 0; i < width; ++i) {
      const double xc = i + 0.5;
      while (k < crossings.size() && crossings[k].x <= xc) ++k;
      const double eps = 1e-9 * (1.0 + std::abs(xc));
      const bool near_left = k > 0 && xc - crossings[k - 1].x <= eps;
      const bool near_right = k < crossings.size() && crossings[k].x - xc <= eps;
      int wn;
      if (near_left || near_right) {
        wn = winding_number(ring, {xc, yc});
      } else {
        wn = right_sum[k];
      }
      if (wn != 0) mask.set(i, j);
    }
  }
  return mask;
}

double mask_iou(const Mask& a, const Mask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "mask_iou on masks of different sizes");
  }
  const auto ba = a.bits();
  const auto bb = b.bits();
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < ba.size(); ++i) {
    inter += ba[i] & bb[i];
    uni += ba[i] | bb[i];
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

BoundingBox bbox_of(const Ring& ring, double image_width, double image_height) {
  if (!(image_width > 0.0) || !(image_height > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be positive");
  }
  double x1 = ring[0].x, x2 = ring[0].x, y1 = ring[0].y, y2 = ring[0].y;
  for (const Point& p : ring.vertices()) {
    x1 = std::min(x1, p.x);
    x2 = std::max(x2, p.x);
    y1 = std::min(y1, p.y);
    y2 = std::max(y2, p.y);
  }
  x1 = std::clamp(x1 / image_width, 0.0, 1.0);
  x2 = std::clamp(x2 / image_width, 0.0, 1.0);
  y1 = std::clamp(y1 / image_height, 0.0, 1.0);
  y2 = std::clamp(y2 / image_height, 0.0, 1.0);
  if (!(x2 > x1) || !(y2 > y1)) {
    throw Error(ErrorCode::kZeroArea, "ring box has no extent inside the image");
  }
  return BoundingBox::from_corners(x1, y1, x2, y2);
}

}  // namespace polyenc
