// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "polyenc/assignment.hpp"
#include "polyenc/encoding.hpp"
#include "polyenc/losses.hpp"
#include "polyenc/refinement.hpp"

namespace polyenc {

struct PipelineDefaults {
  EncodingConfig encoding;
  loss::LossWeights loss_weights;
  MatchWeights match_weights;
  loss::FocalParams focal;
  RefineConfig refine;
};

/// "key = value" lines for the hyperparameters the pipeline is built around:
/// m, the five loss weights and the corner score threshold.
std::string serialize_defaults(const PipelineDefaults& defaults = {});

}  // namespace polyenc
