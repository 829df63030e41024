// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace edgepipe::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kConfigError = 2, kInfeasible = 3, kInternal = 4 };

/// Entry point shared by the binary and the tests. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "S=1..6,m=1..16" or "V=0.01,10,100" style grid specs.
struct GridSpec {
    std::vector<int> S;
    std::vector<int> m;
    std::vector<double> V;
};
GridSpec parse_grid(const std::string& spec);  // throws std::invalid_argument

}  // namespace edgepipe::cli
