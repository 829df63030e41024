// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "edgepipe/decision.hpp"

namespace edgepipe {

/// Virtual delay queues Y_n(t), one per cluster.
struct QueueState {
    int round = 1;
    std::vector<double> Y;

    static QueueState zeros(int clusters) { return QueueState{1, std::vector<double>(clusters, 0.0)}; }
};

/// Y' = max(Y + Gamma^t - Gamma^max, 0).
double queue_update(double Y, double gamma, double gamma_max);

/// Applies the same increment Gamma^t to every queue and advances the round.
QueueState advance_queues(const QueueState& q, double gamma, double gamma_max);

/// tau(t) = max_n (tau_pipe_n + tau_up_n); idle CUs contribute tau_pipe only.
double round_delay(std::span<const ClusterMetrics> metrics);
double round_delay(const SchedulingDecision& decision, const SystemConfig& cfg, const RoundEnvironment& env);

/// V tau(t) + sum_n Y_n (S_n + p_n).
double drift_penalty(const SchedulingDecision& decision, const SystemConfig& cfg, const RoundEnvironment& env,
                     const QueueState& queues, double V);

/// Lambda(t) = V max_n tau_pipe_n + sum_n Y_n S_n.
double lambda_aux(const SchedulingDecision& decision, const SystemConfig& cfg, const RoundEnvironment& env,
                  const QueueState& queues, double V);

/// Upsilon(t) = V max_n tau_up_n + sum_n Y_n p_n (transmitting CUs only in the max).
double upsilon_aux(const SchedulingDecision& decision, const SystemConfig& cfg, const RoundEnvironment& env,
                   const QueueState& queues, double V);

}  // namespace edgepipe
