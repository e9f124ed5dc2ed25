// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace polyenc::cli {

struct KernelCheckOptions {
  std::size_t heads = 8;
  std::size_t levels = 4;
  std::size_t points = 4;
  std::uint64_t seed = 0;
  std::size_t configurations = 100;
  /// Negative control: normalize attention weights over all heads at once.
  bool inject_normalization_bug = false;
};

struct PropertyResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  ///< largest observed violation
};

/// Attention invariants (identity, linearity, convex envelope, weight
/// normalization) followed by finite-difference checks of every loss
/// gradient. Each property is checked on `configurations` seeded draws.
std::vector<PropertyResult> run_kernel_checks(const KernelCheckOptions& options);

}  // namespace polyenc::cli
