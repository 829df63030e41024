// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "edgepipe/comm.hpp"
#include "edgepipe/pipeline.hpp"

namespace edgepipe {

/// X(t): segment plans, channel assignment and CU powers of one round.
struct SchedulingDecision {
    int round = 0;
    std::vector<SegmentPlan> plans;   // one per cluster
    ChannelAssignment assignment;
    std::vector<double> powers;       // p_n, 0 for CUs on a virtual channel

    friend bool operator==(const SchedulingDecision&, const SchedulingDecision&) = default;
};

/// Per-cluster evaluation of a decision in one environment.
struct ClusterMetrics {
    double tau_pipe = 0.0;
    std::optional<double> tau_up;  // nullopt: not transmitting
    double energy_pipe = 0.0;
    double energy_com = 0.0;
    double energy_sch = 0.0;
    double epsilon = 0.0;          // interference error, 0 when not transmitting
    double gamma = 0.0;            // Gamma(S_n, eps_n)
};

std::vector<ClusterMetrics> evaluate_clusters(const SchedulingDecision& decision, const SystemConfig& cfg,
                                              const RoundEnvironment& env);

/// System-wide Gamma^t: max over clusters of Gamma(S_n, eps_n).
double system_gamma(const SchedulingDecision& decision, const SystemConfig& cfg, const RoundEnvironment& env);

/// Returns "" if the decision satisfies C1-C9, otherwise the first violated
/// constraint with its cluster index.
std::string decision_violation(const SchedulingDecision& decision, const SystemConfig& cfg,
                               const RoundEnvironment& env);

}  // namespace edgepipe
