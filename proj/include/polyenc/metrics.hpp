// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "polyenc/geometry.hpp"

namespace polyenc::metrics {

using ImageId = std::int64_t;

struct GtInstance {
  ImageId image_id = 0;
  Ring ring;
};

struct PredInstance {
  ImageId image_id = 0;
  Ring ring;
  double score = 0.0;
};

struct ImageSize {
  int width = 300;
  int height = 300;
};

enum class IouMode { kPerImage, kPooled };
enum class CIouMode { kPerPair, kPerImage };

struct EvalConfig {
  /// COCO thresholds 0.50:0.05:0.95.
  std::vector<double> iou_thresholds = {0.50, 0.55, 0.60, 0.65, 0.70,
                                        0.75, 0.80, 0.85, 0.90, 0.95};
  std::size_t max_detections = 100;
  /// Raster size for images not listed in `image_sizes`.
  ImageSize default_size{};
  std::map<ImageId, ImageSize> image_sizes;

  /// Pair matching for MTA, N ratio and C-IoU.
  double match_iou = 0.5;
  std::size_t mta_samples = 1000;
  /// Tangent comparisons whose projected step is stretched beyond this
  /// factor (or shrunk below its inverse) are discarded.
  double mta_max_stretch = 2.0;

  IouMode iou_mode = IouMode::kPerImage;
  CIouMode c_iou_mode = CIouMode::kPerPair;
  /// With no ground truth at all, report AP/AR as 1 instead of NaN.
  bool empty_as_perfect = false;
};

/// Ground-truth/prediction index pair inside one image plus their mask IoU.
struct MatchedPair {
  ImageId image_id = 0;
  std::size_t gt = 0;    ///< index into the gts span
  std::size_t pred = 0;  ///< index into the preds span
  double iou = 0.0;
};

struct ApAr {
  std::vector<double> ap;  ///< one value per threshold, in [0,1] (NaN if undefined)
  std::vector<double> ar;
};

/// Rasterized instances grouped by image; shared by every metric so masks
/// are computed once.
class EvalContext {
 public:
  EvalContext(std::span<const GtInstance> gts, std::span<const PredInstance> preds,
              const EvalConfig& config);

  const EvalConfig& config() const noexcept { return config_; }
  const std::vector<ImageId>& images() const noexcept { return images_; }
  std::span<const GtInstance> gts() const noexcept { return gts_; }
  std::span<const PredInstance> preds() const noexcept { return preds_; }

  ImageSize size_of(ImageId id) const;
  const std::vector<std::size_t>& gts_in(ImageId id) const;
  /// Prediction indices of an image, by descending score (stable).
  const std::vector<std::size_t>& preds_in(ImageId id) const;

  const Mask& gt_mask(std::size_t i) const { return gt_masks_[i]; }
  const Mask& pred_mask(std::size_t i) const { return pred_masks_[i]; }

  /// Mask IoU between gt i and prediction j (same image).
  double iou(std::size_t gt, std::size_t pred) const;

 private:
  EvalConfig config_;
  std::span<const GtInstance> gts_;
  std::span<const PredInstance> preds_;
  std::vector<ImageId> images_;
  std::map<ImageId, std::vector<std::size_t>> gts_by_image_;
  std::map<ImageId, std::vector<std::size_t>> preds_by_image_;
  std::vector<Mask> gt_masks_;
  std::vector<Mask> pred_masks_;
  std::vector<std::array<int, 4>> gt_boxes_;
  std::vector<std::array<int, 4>> pred_boxes_;
  std::vector<std::size_t> gt_counts_;
  std::vector<std::size_t> pred_counts_;
};

/// COCO-style greedy matching and 101-point interpolated AP per threshold;
/// AR is the final recall with up to max_detections per image.
ApAr coco_ap_ar(const EvalContext& ctx);

/// Mean over images of the IoU of the gt union mask against the prediction
/// union mask (or one pooled ratio, per config.iou_mode).
double dataset_iou(const EvalContext& ctx);

/// Score-ordered greedy matching at IoU >= config.match_iou.
std::vector<MatchedPair> match_pairs(const EvalContext& ctx);

/// Max tangent angle error of one prediction against one ground truth, in
/// degrees. NaN when no tangent comparison survives the stretch filter.
double max_tangent_angle(const Ring& gt, const Ring& pred, std::size_t samples = 1000,
                         double max_stretch = 2.0);

/// Mean over matched pairs of the per-pair max tangent angle error
/// (degrees); NaN when nothing matched.
double mta(const EvalContext& ctx, std::span<const MatchedPair> pairs);

/// Predicted over ground-truth vertex totals across matched pairs.
double n_ratio(const EvalContext& ctx, std::span<const MatchedPair> pairs);

/// (1 - |Na - Nb| / (Na + Nb)) * IoU.
double complexity_aware_iou(std::size_t gt_vertices, std::size_t pred_vertices, double iou);

/// Per-pair mode: mean over ground truths, unmatched ones counting 0.
/// Per-image mode: union masks and vertex totals per image, averaged.
double c_iou(const EvalContext& ctx, std::span<const MatchedPair> pairs);

/// Percentages for the AP/AR family, IoU and C-IoU; degrees for MTA.
struct EvalReport {
  double ap = 0, ap50 = 0, ap75 = 0;
  double ar = 0, ar50 = 0, ar75 = 0;
  double iou = 0;
  double mta_degrees = 0;
  double n_ratio = 0;
  double c_iou = 0;
};

EvalReport evaluate(std::span<const GtInstance> gts, std::span<const PredInstance> preds,
                    const EvalConfig& config = {});

/// Flat "KEY: value" lines with keys AP, AP50, AP75, AR, AR50, AR75, IoU,
/// MTA, N_ratio, C_IoU, preceded by '#' comment lines describing the modes.
std::string format_report(const EvalReport& report, const EvalConfig& config);

}  // namespace polyenc::metrics
