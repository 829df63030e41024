// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include "edgepipe/lyapunov.hpp"

#include <algorithm>

namespace edgepipe {

double queue_update(double Y, double gamma, double gamma_max) { return std::max(Y + gamma - gamma_max, 0.0); }

QueueState advance_queues(const QueueState& q, double gamma, double gamma_max) {
    QueueState next{q.round + 1, q.Y};
    for (double& y : next.Y) y = queue_update(y, gamma, gamma_max);
    return next;
}

double round_delay(std::span<const ClusterMetrics> metrics) {
    double tau = 0.0;
    for (const auto& cm : metrics) tau = std::max(tau, cm.tau_pipe + cm.tau_up.value_or(0.0));
    return tau;
}

double round_delay(const SchedulingDecision& decision, const SystemConfig& cfg, const RoundEnvironment& env) {
    const auto metrics = evaluate_clusters(decision, cfg, env);
    return round_delay(metrics);
}

double drift_penalty(const SchedulingDecision& decision, const SystemConfig& cfg, const RoundEnvironment& env,
                     const QueueState& queues, double V) {
    double penalty = 0.0;
    for (int n = 0; n < cfg.num_clusters(); ++n)
        penalty += queues.Y.at(n) * (decision.plans.at(n).S + decision.powers.at(n));
    return V * round_delay(decision, cfg, env) + penalty;
}

double lambda_aux(const SchedulingDecision& decision, const SystemConfig& cfg, const RoundEnvironment& env,
                  const QueueState& queues, double V) {
    double widest = 0.0;
    double penalty = 0.0;
    for (int n = 0; n < cfg.num_clusters(); ++n) {
        widest = std::max(widest, pipeline_latency(decision.plans.at(n), cfg, env, n));
        penalty += queues.Y.at(n) * decision.plans.at(n).S;
    }
    return V * widest + penalty;
}

double upsilon_aux(const SchedulingDecision& decision, const SystemConfig& cfg, const RoundEnvironment& env,
                   const QueueState& queues, double V) {
    double widest = 0.0;
    double penalty = 0.0;
    for (int n = 0; n < cfg.num_clusters(); ++n) {
        const double p = decision.powers.at(n);
        widest = std::max(widest, uplink_delay(cfg, env, decision.assignment, n, p).value_or(0.0));
        penalty += queues.Y.at(n) * p;
    }
    return V * widest + penalty;
}

}  // namespace edgepipe
