// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyenc/deformable_attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polyenc/error.hpp"

namespace polyenc::attention {

FeatureGrid::FeatureGrid(std::size_t height, std::size_t width, std::size_t channels, double fill)
    : height_(height), width_(width), channels_(channels),
      values_(height * width * channels, fill) {}

FeatureGrid::FeatureGrid(std::size_t height, std::size_t width, std::size_t channels,
                         std::vector<double> values)
    : height_(height), width_(width), channels_(channels), values_(std::move(values)) {
  if (values_.size() != height * width * channels) {
    throw Error(ErrorCode::kShapeMismatch, "feature grid value count does not match its shape");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m{n, n, std::vector<double>(n * n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Point to_level(const FeatureGrid& grid, Point normalized) {
  return {normalized.x * static_cast<double>(grid.width()) - 0.5,
          normalized.y * static_cast<double>(grid.height()) - 0.5};
}

std::vector<double> bilinear_sample(const FeatureGrid& grid, Point loc) {
  std::vector<double> out(grid.channels(), 0.0);
  if (!std::isfinite(loc.x) || !std::isfinite(loc.y)) {
    throw Error(ErrorCode::kNonFinite, "sampling location is not finite");
  }
  const double fx = std::floor(loc.x);
  const double fy = std::floor(loc.y);
  const double tx = loc.x - fx;
  const double ty = loc.y - fy;
  const double corner_w[2][2] = {{(1 - tx) * (1 - ty), tx * (1 - ty)},
                                 {(1 - tx) * ty, tx * ty}};
  for (int dy = 0; dy < 2; ++dy) {
    for (int dx = 0; dx < 2; ++dx) {
      const double w = corner_w[dy][dx];
      if (w == 0.0) continue;
      const double cx = fx + dx;
      const double cy = fy + dy;
      if (cx < 0 || cy < 0 || cx >= static_cast<double>(grid.width()) ||
          cy >= static_cast<double>(grid.height())) {
        continue;
      }
      const auto cell = grid.cell(static_cast<std::size_t>(cy), static_cast<std::size_t>(cx));
      for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * cell[c];
    }
  }
  return out;
}

std::vector<double> normalize_weights(std::span<const double> raw, const AttentionShape& shape) {
  if (raw.size() != shape.slots()) {
    throw Error(ErrorCode::kShapeMismatch, "expected " + std::to_string(shape.slots()) +
                                               " raw weights, got " + std::to_string(raw.size()));
  }
  const std::size_t per_head = shape.levels * shape.points;
  std::vector<double> out(raw.size());
  for (std::size_t m = 0; m < shape.heads; ++m) {
    const auto head = raw.subspan(m * per_head, per_head);
    const double peak = *std::max_element(head.begin(), head.end());
    double sum = 0.0;
    for (std::size_t s = 0; s < per_head; ++s) {
      out[m * per_head + s] = std::exp(head[s] - peak);
      sum += out[m * per_head + s];
    }
    for (std::size_t s = 0; s < per_head; ++s) out[m * per_head + s] /= sum;
  }
  return out;
}

namespace {

void check_shapes(const FeaturePyramid& pyramid, const AttentionParams& params) {
  const AttentionShape& shape = params.shape;
  if (pyramid.levels.size() != shape.levels || shape.levels == 0) {
    throw Error(ErrorCode::kShapeMismatch, "pyramid has " + std::to_string(pyramid.levels.size()) +
                                               " levels, params expect " +
                                               std::to_string(shape.levels));
  }
  const std::size_t c = pyramid.channels();
  for (const FeatureGrid& level : pyramid.levels) {
    if (level.channels() != c) throw Error(ErrorCode::kShapeMismatch, "channel count differs across levels");
  }
  if (shape.heads == 0 || shape.points == 0 || c == 0 || c % shape.heads != 0) {
    throw Error(ErrorCode::kShapeMismatch, "channels must be a positive multiple of heads");
  }
  for (const Matrix* m : {&params.value_proj, &params.out_proj}) {
    if (m->rows != c || m->cols != c || m->values.size() != c * c) {
      throw Error(ErrorCode::kShapeMismatch, "projection matrices must be C x C");
    }
  }
}

}  // namespace

std::vector<std::vector<double>> msda_forward(const FeaturePyramid& pyramid,
                                              std::span<const Query> queries,
                                              const AttentionParams& params) {
  check_shapes(pyramid, params);
  const AttentionShape& shape = params.shape;
  const std::size_t channels = pyramid.channels();
  const std::size_t head_dim = channels / shape.heads;

  std::vector<std::vector<double>> outputs;
  outputs.reserve(queries.size());
  for (const Query& q : queries) {
    if (q.weights.size() != shape.slots() || q.offsets.size() != shape.slots()) {
      throw Error(ErrorCode::kShapeMismatch, "query weights/offsets do not match the slot count");
    }
    std::vector<double> out(channels, 0.0);
    std::vector<double> pooled(channels);
    std::vector<double> head_value(head_dim);
    for (std::size_t m = 0; m < shape.heads; ++m) {
      // The value projection is linear, so weight the raw samples first.
      std::fill(pooled.begin(), pooled.end(), 0.0);
      for (std::size_t l = 0; l < shape.levels; ++l) {
        const FeatureGrid& grid = pyramid.levels[l];
        const Point base = to_level(grid, q.ref_point);
        for (std::size_t k = 0; k < shape.points; ++k) {
          const std::size_t s = shape.slot(m, l, k);
          const double a = q.weights[s];
          if (a == 0.0) continue;
          const std::vector<double> sample = bilinear_sample(grid, base + q.offsets[s]);
          for (std::size_t c = 0; c < channels; ++c) pooled[c] += a * sample[c];
        }
      }
      for (std::size_t d = 0; d < head_dim; ++d) {
        const std::size_t row = m * head_dim + d;
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) acc += params.value_proj(row, c) * pooled[c];
        head_value[d] = acc;
      }
      for (std::size_t r = 0; r < channels; ++r) {
        double acc = 0.0;
        for (std::size_t d = 0; d < head_dim; ++d) {
          acc += params.out_proj(r, m * head_dim + d) * head_value[d];
        }
        out[r] += acc;
      }
    }
    outputs.push_back(std::move(out));
  }
  return outputs;
}

std::vector<std::vector<double>> msda_forward_raw(const FeaturePyramid& pyramid,
                                                  std::span<const Query> queries,
                                                  const AttentionParams& params) {
  std::vector<Query> normalized(queries.begin(), queries.end());
  for (Query& q : normalized) q.weights = normalize_weights(q.weights, params.shape);
  return msda_forward(pyramid, normalized, params);
}

}  // namespace polyenc::attention
