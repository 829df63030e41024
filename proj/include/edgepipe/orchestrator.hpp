// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgepipe/config.hpp"
#include "edgepipe/decision.hpp"
#include "edgepipe/environment.hpp"
#include "edgepipe/kernels.hpp"
#include "edgepipe/lyapunov.hpp"

namespace edgepipe {

enum class Policy { dssra, random, loss_only, delay_only, uniform_split };

std::string_view policy_name(Policy p) noexcept;
Policy parse_policy(std::string_view name);  // throws std::invalid_argument

struct RoundMetrics {
    int round = 0;
    std::vector<double> tau_pipe;
    std::vector<std::optional<double>> tau_up;
    double tau = 0.0;
    std::vector<double> energy_pipe;
    std::vector<double> energy_com;
    std::vector<double> energy_sch;
    double gamma = 0.0;
    std::vector<double> queues;     // Y_n(t+1)
    double drift_penalty = 0.0;     // at Y_n(t)
    std::optional<double> bound;    // running optimality-gap bound; nullopt if divergent
    bool relaxed = false;           // C11 was relaxed this round
};

struct RoundRecord {
    SchedulingDecision decision;
    RoundMetrics metrics;
};

struct TraceSummary {
    int rounds = 0;
    double avg_tau = 0.0;
    double cum_tau = 0.0;
    double avg_gamma = 0.0;
    double gamma_max = 0.0;
    double max_final_queue = 0.0;
    double avg_backlog = 0.0;       // time-average of mean_n Y_n
};

struct TraceLog {
    std::string policy;
    std::uint64_t seed = 0;
    double V = 0.0;
    std::vector<RoundRecord> rounds;
    TraceSummary summary;
};

struct DssraOptions {
    bool enforce_gamma = true;
    bool uniform_split = false;   // delta fixed to the balanced split over all devices
    int max_inner_iterations = 20;
    double queue_tolerance = 1e-9;
    Exec exec = Exec::parallel;
};

/// One round of DSSRA: alternate the segment scheduler and the resource
/// allocator under the current working queues until they stabilise.
SchedulingDecision dssra_round(const SystemConfig& cfg, const RoundEnvironment& env, const QueueState& queues,
                               double V, const DssraOptions& options = {});

/// Per-run state the baselines need across rounds.
struct BaselineHistory {
    std::vector<double> previous_delay;  // empty before the first round
};

/// Synthetic per-cluster training-loss proxy used by the loss-only baseline.
double loss_proxy(const SystemConfig& cfg, int round, int n);

SchedulingDecision baseline_decision(Policy policy, const SystemConfig& cfg, const RoundEnvironment& env,
                                     const QueueState& queues, const BaselineHistory& history);

RoundMetrics evaluate_round(const SchedulingDecision& decision, const SystemConfig& cfg,
                            const RoundEnvironment& env, const QueueState& queues, double V);

struct SimulationOptions {
    Exec exec = Exec::parallel;
    int max_infeasible_streak = 3;
};

/// T rounds of sample -> decide -> evaluate -> update queues.
TraceLog run_simulation(const SystemConfig& cfg, int T, Policy policy, const SimulationOptions& options = {});

TraceSummary summarize(const std::vector<RoundRecord>& rounds, double gamma_max);

}  // namespace edgepipe
