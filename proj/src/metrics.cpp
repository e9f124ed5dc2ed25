// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyenc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include "polyenc/error.hpp"

namespace polyenc::metrics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Extent of the set pixels as [x0, y0, x1, y1), or x0 == x1 when empty.
std::array<int, 4> extent(const Mask& mask) {
  int x0 = mask.width(), y0 = mask.height(), x1 = 0, y1 = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x + 1);
      y1 = std::max(y1, y + 1);
    }
  }
  if (x1 == 0) return {0, 0, 0, 0};
  return {x0, y0, x1, y1};
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return kNaN;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::size_t threshold_index(std::span<const double> thresholds, double wanted) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (std::abs(thresholds[i] - wanted) < 1e-9) return i;
  }
  return thresholds.size();
}

const std::vector<std::size_t> kNoIndices;

}  // namespace

EvalContext::EvalContext(std::span<const GtInstance> gts, std::span<const PredInstance> preds,
                         const EvalConfig& config)
    : config_(config), gts_(gts), preds_(preds) {
  std::set<ImageId> ids;
  for (const auto& [id, size] : config_.image_sizes) ids.insert(id);
  for (std::size_t i = 0; i < gts.size(); ++i) {
    ids.insert(gts[i].image_id);
    gts_by_image_[gts[i].image_id].push_back(i);
  }
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!std::isfinite(preds[i].score)) {
      throw Error(ErrorCode::kNonFinite, "prediction score is not finite");
    }
    ids.insert(preds[i].image_id);
    preds_by_image_[preds[i].image_id].push_back(i);
  }
  images_.assign(ids.begin(), ids.end());
  for (auto& [id, indices] : preds_by_image_) {
    std::stable_sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
      return preds[a].score > preds[b].score;
    });
  }

  gt_masks_.reserve(gts.size());
  for (const GtInstance& g : gts) {
    const ImageSize size = size_of(g.image_id);
    gt_masks_.push_back(rasterize(g.ring, size.width, size.height));
    gt_boxes_.push_back(extent(gt_masks_.back()));
    gt_counts_.push_back(gt_masks_.back().count());
  }
  pred_masks_.reserve(preds.size());
  for (const PredInstance& p : preds) {
    const ImageSize size = size_of(p.image_id);
    pred_masks_.push_back(rasterize(p.ring, size.width, size.height));
    pred_boxes_.push_back(extent(pred_masks_.back()));
    pred_counts_.push_back(pred_masks_.back().count());
  }
}

ImageSize EvalContext::size_of(ImageId id) const {
  auto it = config_.image_sizes.find(id);
  return it == config_.image_sizes.end() ? config_.default_size : it->second;
}

const std::vector<std::size_t>& EvalContext::gts_in(ImageId id) const {
  auto it = gts_by_image_.find(id);
  return it == gts_by_image_.end() ? kNoIndices : it->second;
}

const std::vector<std::size_t>& EvalContext::preds_in(ImageId id) const {
  auto it = preds_by_image_.find(id);
  return it == preds_by_image_.end() ? kNoIndices : it->second;
}

double EvalContext::iou(std::size_t gt, std::size_t pred) const {
  const Mask& a = gt_masks_[gt];
  const Mask& b = pred_masks_[pred];
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "gt and prediction rasterized at different sizes");
  }
  const auto& ea = gt_boxes_[gt];
  const auto& eb = pred_boxes_[pred];
  const int x0 = std::max(ea[0], eb[0]), y0 = std::max(ea[1], eb[1]);
  const int x1 = std::min(ea[2], eb[2]), y1 = std::min(ea[3], eb[3]);
  std::size_t inter = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) inter += (a.at(x, y) && b.at(x, y)) ? 1 : 0;
  }
  const std::size_t uni = gt_counts_[gt] + pred_counts_[pred] - inter;
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

ApAr coco_ap_ar(const EvalContext& ctx) {
  const EvalConfig& cfg = ctx.config();
  const std::size_t npos = ctx.gts().size();
  ApAr out;

  for (double threshold : cfg.iou_thresholds) {
    struct Detection {
      double score;
      bool tp;
    };
    std::vector<Detection> detections;
    for (ImageId id : ctx.images()) {
      const auto& gts = ctx.gts_in(id);
      const auto& preds = ctx.preds_in(id);
      std::vector<char> taken(gts.size(), 0);
      const std::size_t limit = std::min(preds.size(), cfg.max_detections);
      for (std::size_t d = 0; d < limit; ++d) {
        const std::size_t p = preds[d];
        std::size_t best = gts.size();
        double best_iou = -1.0;
        for (std::size_t g = 0; g < gts.size(); ++g) {
          if (taken[g]) continue;
          const double v = ctx.iou(gts[g], p);
          if (v >= threshold && v > best_iou) {
            best = g;
            best_iou = v;
          }
        }
        if (best < gts.size()) taken[best] = 1;
        detections.push_back({ctx.preds()[p].score, best < gts.size()});
      }
    }

    if (npos == 0) {
      const double v = cfg.empty_as_perfect ? (detections.empty() ? 1.0 : 0.0) : kNaN;
      out.ap.push_back(v);
      out.ar.push_back(v);
      continue;
    }

    std::stable_sort(detections.begin(), detections.end(),
                     [](const Detection& a, const Detection& b) { return a.score > b.score; });
    std::vector<double> recall(detections.size()), precision(detections.size());
    std::size_t tp = 0;
    for (std::size_t i = 0; i < detections.size(); ++i) {
      if (detections[i].tp) ++tp;
      recall[i] = static_cast<double>(tp) / static_cast<double>(npos);
      precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    }
    for (std::size_t i = precision.size(); i-- > 1;) {
      precision[i - 1] = std::max(precision[i - 1], precision[i]);
    }
    double sum = 0.0;
    for (int r = 0; r <= 100; ++r) {
      const double level = r / 100.0;
      const auto it = std::lower_bound(recall.begin(), recall.end(), level);
      if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
    }
    out.ap.push_back(sum / 101.0);
    out.ar.push_back(static_cast<double>(tp) / static_cast<double>(npos));
  }
  return out;
}

double dataset_iou(const EvalContext& ctx) {
  std::vector<double> per_image;
  std::size_t pooled_inter = 0, pooled_union = 0;
  for (ImageId id : ctx.images()) {
    const ImageSize size = ctx.size_of(id);
    Mask gt_union(size.width, size.height);
    Mask pred_union(size.width, size.height);
    for (std::size_t g : ctx.gts_in(id)) gt_union |= ctx.gt_mask(g);
    for (std::size_t p : ctx.preds_in(id)) pred_union |= ctx.pred_mask(p);
    per_image.push_back(mask_iou(gt_union, pred_union));
    const auto a = gt_union.bits();
    const auto b = pred_union.bits();
    for (std::size_t i = 0; i < a.size(); ++i) {
      pooled_inter += a[i] & b[i];
      pooled_union += a[i] | b[i];
    }
  }
  if (ctx.config().iou_mode == IouMode::kPooled) {
    if (pooled_union == 0) return 1.0;
    return static_cast<double>(pooled_inter) / static_cast<double>(pooled_union);
  }
  return mean_of(per_image);
}

std::vector<MatchedPair> match_pairs(const EvalContext& ctx) {
  std::vector<MatchedPair> pairs;
  for (ImageId id : ctx.images()) {
    const auto& gts = ctx.gts_in(id);
    std::vector<char> taken(gts.size(), 0);
    for (std::size_t p : ctx.preds_in(id)) {
      std::size_t best = gts.size();
      double best_iou = -1.0;
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (taken[g]) continue;
        const double v = ctx.iou(gts[g], p);
        if (v >= ctx.config().match_iou && v > best_iou) {
          best = g;
          best_iou = v;
        }
      }
      if (best == gts.size()) continue;
      taken[best] = 1;
      pairs.push_back({id, gts[best], p, best_iou});
    }
  }
  return pairs;
}

namespace {

Point nearest_on_ring(const Ring& ring, Point p) {
  const auto& v = ring.vertices();
  Point best = v[0];
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point a = v[i];
    const Point ab = v[(i + 1) % v.size()] - a;
    const Point ap = p - a;
    const double t = std::clamp((ap.x * ab.x + ap.y * ab.y) / (ab.x * ab.x + ab.y * ab.y), 0.0, 1.0);
    const Point q = a + t * ab;
    const double d2 = (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = q;
    }
  }
  return best;
}

}  // namespace

double max_tangent_angle(const Ring& gt, const Ring& pred, std::size_t samples,
                         double max_stretch) {
  if (samples == 0) throw Error(ErrorCode::kInvalidArgument, "mta needs at least one sample");
  const auto& v = pred.vertices();
  const std::size_t n = v.size();
  std::vector<double> cumulative(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cumulative[i + 1] = cumulative[i] + distance(v[i], v[(i + 1) % n]);
  const double step = cumulative[n] / static_cast<double>(samples);

  double worst = -1.0;
  std::size_t edge = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double s = static_cast<double>(k) * step;
    while (edge + 1 < n && cumulative[edge + 1] <= s) ++edge;
    const Point a = v[edge];
    const Point b = v[(edge + 1) % n];
    const double len = cumulative[edge + 1] - cumulative[edge];
    const Point dir = (1.0 / len) * (b - a);
    const double along = std::clamp(s - cumulative[edge], 0.0, len);
    const Point p = a + along * dir;

    // Short probe along the prediction edge, kept inside the edge.
    const double ahead = len - along;
    Point from = p, to = p;
    if (ahead >= along || ahead >= step) {
      to = p + std::min(step, ahead) * dir;
    } else {
      from = p - std::min(step, along) * dir;
    }
    const Point e = to - from;
    const Point pe = nearest_on_ring(gt, to) - nearest_on_ring(gt, from);
    const double e_len = std::hypot(e.x, e.y);
    const double pe_len = std::hypot(pe.x, pe.y);
    if (e_len == 0.0 || pe_len == 0.0) continue;
    const double stretch = e_len / pe_len;
    if (!(stretch < max_stretch && stretch > 1.0 / max_stretch)) continue;

    const double cross = e.x * pe.y - e.y * pe.x;
    const double dot = e.x * pe.x + e.y * pe.y;
    double angle = std::atan2(std::abs(cross), std::abs(dot));
    if (angle < 1e-9) angle = 0.0;  // rounding noise on coincident edges
    worst = std::max(worst, angle);
  }
  if (worst < 0.0) return kNaN;
  return worst * 180.0 / std::numbers::pi;
}

double mta(const EvalContext& ctx, std::span<const MatchedPair> pairs) {
  std::vector<double> scores;
  for (const MatchedPair& pair : pairs) {
    const double angle = max_tangent_angle(ctx.gts()[pair.gt].ring, ctx.preds()[pair.pred].ring,
                                           ctx.config().mta_samples, ctx.config().mta_max_stretch);
    if (!std::isnan(angle)) scores.push_back(angle);
  }
  return mean_of(scores);
}

double n_ratio(const EvalContext& ctx, std::span<const MatchedPair> pairs) {
  if (pairs.empty()) return kNaN;
  std::size_t pred_vertices = 0, gt_vertices = 0;
  for (const MatchedPair& pair : pairs) {
    pred_vertices += ctx.preds()[pair.pred].ring.size();
    gt_vertices += ctx.gts()[pair.gt].ring.size();
  }
  return static_cast<double>(pred_vertices) / static_cast<double>(gt_vertices);
}

double complexity_aware_iou(std::size_t gt_vertices, std::size_t pred_vertices, double iou) {
  const double na = static_cast<double>(gt_vertices);
  const double nb = static_cast<double>(pred_vertices);
  const double rd = na + nb == 0.0 ? 0.0 : std::abs(na - nb) / (na + nb);
  return (1.0 - rd) * iou;
}

double c_iou(const EvalContext& ctx, std::span<const MatchedPair> pairs) {
  if (ctx.config().c_iou_mode == CIouMode::kPerPair) {
    if (ctx.gts().empty()) return kNaN;
    double sum = 0.0;
    for (const MatchedPair& pair : pairs) {
      sum += complexity_aware_iou(ctx.gts()[pair.gt].ring.size(), ctx.preds()[pair.pred].ring.size(),
                                  pair.iou);
    }
    return sum / static_cast<double>(ctx.gts().size());
  }

  std::vector<double> per_image;
  for (ImageId id : ctx.images()) {
    const auto& gts = ctx.gts_in(id);
    const auto& preds = ctx.preds_in(id);
    if (gts.empty() && preds.empty()) continue;
    const ImageSize size = ctx.size_of(id);
    Mask gt_union(size.width, size.height);
    Mask pred_union(size.width, size.height);
    std::size_t gt_vertices = 0, pred_vertices = 0;
    for (std::size_t g : gts) {
      gt_union |= ctx.gt_mask(g);
      gt_vertices += ctx.gts()[g].ring.size();
    }
    for (std::size_t p : preds) {
      pred_union |= ctx.pred_mask(p);
      pred_vertices += ctx.preds()[p].ring.size();
    }
    per_image.push_back(complexity_aware_iou(gt_vertices, pred_vertices, mask_iou(gt_union, pred_union)));
  }
  return mean_of(per_image);
}

EvalReport evaluate(std::span<const GtInstance> gts, std::span<const PredInstance> preds,
                    const EvalConfig& config) {
  const EvalContext ctx(gts, preds, config);
  const ApAr apar = coco_ap_ar(ctx);
  const auto at = [&](const std::vector<double>& values, double threshold) {
    const std::size_t i = threshold_index(config.iou_thresholds, threshold);
    return i < values.size() ? values[i] : kNaN;
  };
  const std::vector<MatchedPair> pairs = match_pairs(ctx);

  EvalReport r;
  r.ap = 100.0 * mean_of(apar.ap);
  r.ap50 = 100.0 * at(apar.ap, 0.50);
  r.ap75 = 100.0 * at(apar.ap, 0.75);
  r.ar = 100.0 * mean_of(apar.ar);
  r.ar50 = 100.0 * at(apar.ar, 0.50);
  r.ar75 = 100.0 * at(apar.ar, 0.75);
  r.iou = 100.0 * dataset_iou(ctx);
  r.mta_degrees = mta(ctx, pairs);
  r.n_ratio = n_ratio(ctx, pairs);
  r.c_iou = 100.0 * c_iou(ctx, pairs);
  return r;
}

std::string format_report(const EvalReport& report, const EvalConfig& config) {
  std::string out;
  out += std::string("# iou_mode: ") +
         (config.iou_mode == IouMode::kPerImage ? "per-image" : "pooled") + "\n";
  out += std::string("# c_iou_mode: ") +
         (config.c_iou_mode == CIouMode::kPerPair ? "per-pair" : "per-image") + "\n";
  out += "# categories: all category ids treated as one class\n";
  const std::pair<const char*, double> rows[] = {
      {"AP", report.ap},   {"AP50", report.ap50},        {"AP75", report.ap75},
      {"AR", report.ar},   {"AR50", report.ar50},        {"AR75", report.ar75},
      {"IoU", report.iou}, {"MTA", report.mta_degrees},  {"N_ratio", report.n_ratio},
      {"C_IoU", report.c_iou},
  };
  char line[64];
  for (const auto& [key, value] : rows) {
    if (std::isnan(value)) {
      std::snprintf(line, sizeof line, "%s: nan\n", key);
    } else {
      std::snprintf(line, sizeof line, "%s: %.6f\n", key, value);
    }
    out += line;
  }
  return out;
}

}  // namespace polyenc::metrics
