// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include "edgepipe/decision.hpp"

#include <algorithm>

#include "edgepipe/convergence.hpp"

namespace edgepipe {

std::vector<ClusterMetrics> evaluate_clusters(const SchedulingDecision& decision, const SystemConfig& cfg,
                                              const RoundEnvironment& env) {
    const int N = cfg.num_clusters();
    std::vector<ClusterMetrics> out(N);
    for (int n = 0; n < N; ++n) {
        const auto& plan = decision.plans.at(n);
        auto& cm = out[n];
        cm.tau_pipe = pipeline_latency(plan, cfg, env, n);
        cm.energy_pipe = pipeline_energy(plan, cfg, env, n);
        cm.energy_sch = scheduling_energy(plan, cfg, env, n);
        const double p = decision.powers.at(n);
        cm.tau_up = uplink_delay(cfg, env, decision.assignment, n, p);
        cm.energy_com = cu_transmit_energy(cfg, env, decision.assignment, n, p);
        if (cm.tau_up) {
            const int j = *decision.assignment.channel(n);
            cm.epsilon = interference_error(p, env.clusters[n].uplink_gain[j], env.clusters[n].uplink_interference,
                                            cfg.convergence.C);
        }
        cm.gamma = gamma_round(plan.S, cm.epsilon, cfg.convergence, N, cfg.model.L);
    }
    return out;
}

double system_gamma(const SchedulingDecision& decision, const SystemConfig& cfg, const RoundEnvironment& env) {
    double g = 0.0;
    for (const auto& cm : evaluate_clusters(decision, cfg, env)) g = std::max(g, cm.gamma);
    return g;
}

std::string decision_violation(const SchedulingDecision& decision, const SystemConfig& cfg,
                               const RoundEnvironment& env) {
    const int N = cfg.num_clusters();
    const int J = cfg.channels;
    if (static_cast<int>(decision.plans.size()) != N || static_cast<int>(decision.powers.size()) != N ||
        decision.assignment.clusters() != N)
        return "shape";

    for (int n = 0; n < N; ++n) {
        const auto& plan = decision.plans[n];
        const auto& cluster = cfg.clusters[n];
        if (auto v = plan_violation(plan, cluster, cfg.model); !v.empty()) return v + " @cluster " + std::to_string(n);

        std::vector<double> hops(plan.delta.size(), 0.0);
        for (std::size_t k = 0; k < plan.delta.size(); ++k) {
            if (plan.delta[k] == 0) continue;
            const auto& dev = cluster.devices[k];
            const double hop_energy =
                plan.S > 1 ? d2d_energy(cfg, env, n, static_cast<int>(k), dev.d2d_power) : 0.0;
            const double e = chunk_compute_energy(plan.delta[k], plan.micro_batch, dev,
                                                  env.clusters[n].devices[k].clock_hz, cfg.model) +
                             hop_energy;
            if (e > dev.energy_budget * (1.0 + 1e-9)) return "C9' @cluster " + std::to_string(n);
        }
    }

    if (!decision.assignment.structurally_valid()) return "C3-C5";
    int transmitting = 0;
    for (int n = 0; n < N; ++n) transmitting += decision.assignment.transmitting(n) ? 1 : 0;
    if (transmitting != std::min(N, J)) return "C4";

    for (int n = 0; n < N; ++n) {
        const double p = decision.powers[n];
        const double pmax = cfg.clusters[n].cu_power_max;
        if (p < 0.0 || p > pmax * (1.0 + 1e-12)) return "C6 @cluster " + std::to_string(n);
        if (decision.assignment.transmitting(n)) {
            if (p <= 0.0) return "C6 (transmitting at zero power) @cluster " + std::to_string(n);
            const double e = cu_transmit_energy(cfg, env, decision.assignment, n, p);
            if (e > cfg.clusters[n].cu_energy_budget * (1.0 + 1e-6)) return "C8 @cluster " + std::to_string(n);
        }
    }
    return {};
}

}  // namespace edgepipe
