// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace polyenc {

/// Pixel coordinates, y axis pointing down.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }

double distance(Point a, Point b);

/// Closed simple polygon. The last vertex connects back to the first.
///
/// Construction validates: at least three vertices, finite coordinates and
/// no two cyclically consecutive vertices equal. Violations throw
/// Error(kMalformedPolygon).
class Ring {
 public:
  explicit Ring(std::vector<Point> vertices);

  /// Drops cyclically consecutive duplicates before validating. Useful for
  /// network outputs, where repeated points are common.
  static Ring from_points_dedup(std::span<const Point> points);

  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  const Point& operator[](std::size_t i) const { return vertices_[i]; }

  friend bool operator==(const Ring&, const Ring&) = default;

 private:
  std::vector<Point> vertices_;
};

/// Normalized center/size box. Geometry helpers do not enforce the [0,1]
/// range so the same type can carry boxes in any frame.
struct BoundingBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  static BoundingBox from_corners(double x1, double y1, double x2, double y2) {
    return {(x1 + x2) / 2.0, (y1 + y2) / 2.0, x2 - x1, y2 - y1};
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

class Mask {
 public:
  Mask(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool value = true) { bits_[index(x, y)] = value ? 1 : 0; }

  std::size_t count() const;
  bool empty() const { return count() == 0; }

  /// Pixel-wise OR; dimensions must match.
  Mask& operator|=(const Mask& other);

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

/// Shoelace sum in raw image coordinates. Positive means the ring runs
/// clockwise on screen (y down).
double signed_area(const Ring& ring);

double perimeter(const Ring& ring);

/// |signed_area| below this is treated as a degenerate polygon.
inline constexpr double kZeroAreaTolerance = 1e-9;

/// Screen-clockwise orientation, vertex 0 at the top extreme point (min y,
/// then min x). Throws Error(kZeroArea) for degenerate rings.
Ring canonicalize(const Ring& ring);

/// Pixel (i, j) is set iff its center (i + 0.5, j + 0.5) has a nonzero
/// winding number. Centers exactly on an edge are outside.
Mask rasterize(const Ring& ring, int width, int height);

/// Winding number of `p` with respect to `ring` (ray cast towards +x).
int winding_number(const Ring& ring, Point p);

/// |a and b| / |a or b|; 1 when both are empty.
double mask_iou(const Mask& a, const Mask& b);

/// Tight box of the vertices, clamped to the image and normalized by its
/// size. Throws Error(kZeroArea) when nothing of the ring is in frame.
BoundingBox bbox_of(const Ring& ring, double image_width, double image_height);

}  // namespace polyenc
