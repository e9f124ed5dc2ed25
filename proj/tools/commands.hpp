// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polyenc::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kDomainFailure = 1, kUsage = 2 };

/// Runs the command line `args` (without the program name), writing normal
/// output to `out` and diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polyenc::cli
