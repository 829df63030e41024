// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "edgepipe/config.hpp"
#include "edgepipe/environment.hpp"
#include "edgepipe/seg_solver.hpp"

namespace edgepipe {

/// Execution policy for the data-parallel loops. `serial` is the reference.
enum class Exec { serial, parallel };

/// Solves every cluster's segment problem. Results are index-aligned with
/// `problems`; the first infeasibility (lowest index) is rethrown.
std::vector<SegmentSchedule> schedule_all_clusters(const std::vector<SegmentProblem>& problems, Exec exec);

/// tau_pipe of balanced (S, m) plans for cluster n. NaN marks cells that
/// violate C7 or need more devices than the cluster has.
struct LatencyGrid {
    std::vector<int> S_values;
    std::vector<int> m_values;
    std::vector<double> tau;  // row-major [S][m]

    double at(std::size_t s, std::size_t m) const { return tau[s * m_values.size() + m]; }
};

LatencyGrid uniform_latency_grid(const SystemConfig& cfg, const RoundEnvironment& env, int n,
                                 const std::vector<int>& S_values, const std::vector<int>& m_values, Exec exec);

}  // namespace edgepipe
