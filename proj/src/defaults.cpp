// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyenc/defaults.hpp"

#include <cstdio>

namespace polyenc {

std::string serialize_defaults(const PipelineDefaults& d) {
  std::string out = "# polyenc default hyperparameters\n";
  char line[64];
  auto put = [&](const char* key, double value) {
    std::snprintf(line, sizeof line, "%s = %g\n", key, value);
    out += line;
  };
  put("m", static_cast<double>(d.encoding.m));
  put("lambda_cls", d.loss_weights.lambda_cls);
  put("lambda_poly", d.loss_weights.lambda_poly);
  put("lambda_cnr", d.loss_weights.lambda_cnr);
  put("lambda_iou", d.loss_weights.lambda_iou);
  put("lambda_l1", d.loss_weights.lambda_l1);
  put("score_threshold", d.refine.score_threshold);
  return out;
}

}  // namespace polyenc
