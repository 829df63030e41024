// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include "edgepipe/pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "edgepipe/comm.hpp"

namespace edgepipe {

SegmentPlan SegmentPlan::make(std::vector<int> delta, int m, int batch_size) {
    SegmentPlan plan;
    plan.S = static_cast<int>(std::count_if(delta.begin(), delta.end(), [](int d) { return d > 0; }));
    plan.delta = std::move(delta);
    plan.m = m;
    plan.micro_batch = micro_batch_size(batch_size, m);
    return plan;
}

std::string plan_violation(const SegmentPlan& plan, const ClusterProfile& cluster, const ModelSpec& model) {
    const int K = static_cast<int>(cluster.devices.size());
    if (static_cast<int>(plan.delta.size()) != K) return "C1 (delta length != K)";
    if (std::any_of(plan.delta.begin(), plan.delta.end(), [](int d) { return d < 0; })) return "C1 (negative delta)";
    if (std::accumulate(plan.delta.begin(), plan.delta.end(), 0) != model.L) return "C1 (sum delta != L)";
    const int S = static_cast<int>(std::count_if(plan.delta.begin(), plan.delta.end(), [](int d) { return d > 0; }));
    if (S != plan.S || S < 1 || S > K) return "C2";
    if (plan.m < 1 || plan.m > model.batch_size) return "C1 (m out of range)";
    if (plan.micro_batch != micro_batch_size(model.batch_size, plan.m)) return "b_hat != ceil(b/m)";
    for (int k = 0; k < K; ++k)
        if (plan.delta[k] * cluster.devices[k].mem_per_teb > cluster.devices[k].mem_budget * (1.0 + 1e-12)) return "C7";
    return {};
}

int micro_batch_size(int b, int m) {
    if (m < 1 || m > b) throw std::invalid_argument("micro-batch count must satisfy 1 <= m <= b");
    return (b + m - 1) / m;
}

double stage_time(int delta, int micro_batch, double flops_per_cycle, double clock_hz, const ModelSpec& model) {
    return delta * (micro_batch * model.o_fwd + model.o_bwd) / (flops_per_cycle * clock_hz);
}

std::vector<StageTiming> stage_timings(const SegmentPlan& plan, const SystemConfig& cfg, const RoundEnvironment& env,
                                       int n) {
    const auto& cluster = cfg.clusters.at(n);
    const auto& real = env.clusters.at(n);
    std::vector<StageTiming> out;
    for (std::size_t k = 0; k < plan.delta.size(); ++k) {
        if (plan.delta[k] <= 0) continue;
        const auto& dev = cluster.devices[k];
        StageTiming st;
        st.compute = stage_time(plan.delta[k], plan.micro_batch, dev.flops_per_cycle, real.devices[k].clock_hz, cfg.model);
        st.hop = plan.S > 1 ? d2d_delay(cfg, env, n, static_cast<int>(k), dev.d2d_power) : 0.0;
        out.push_back(st);
    }
    return out;
}

double pipeline_latency(std::span<const StageTiming> stages, int m) {
    if (stages.empty()) throw std::invalid_argument("pipeline_latency: empty plan");
    double widest = 0.0;
    for (const auto& s : stages) widest = std::max(widest, s.compute + s.hop);
    const double S = static_cast<double>(stages.size());
    return (S + m - 1) * widest - stages.back().hop;
}

double pipeline_latency(const SegmentPlan& plan, const SystemConfig& cfg, const RoundEnvironment& env, int n) {
    const auto stages = stage_timings(plan, cfg, env, n);
    return pipeline_latency(stages, plan.m);
}

double chunk_compute_energy(int delta, int micro_batch, const DeviceProfile& device, double clock_hz,
                            const ModelSpec& model) {
    return device.capacitance * delta * (micro_batch * model.o_fwd + model.o_bwd) / device.flops_per_cycle * clock_hz *
           clock_hz;
}

double scheduling_energy(const SegmentPlan& plan, const SystemConfig& cfg, const RoundEnvironment& env, int n) {
    if (plan.S <= 1) return 0.0;
    const auto& cluster = cfg.clusters.at(n);
    double total = 0.0;
    for (std::size_t k = 0; k < plan.delta.size(); ++k)
        if (plan.delta[k] > 0)
            total += d2d_energy(cfg, env, n, static_cast<int>(k), cluster.devices[k].d2d_power);
    return total;
}

double pipeline_energy(const SegmentPlan& plan, const SystemConfig& cfg, const RoundEnvironment& env, int n) {
    const auto& cluster = cfg.clusters.at(n);
    const auto& real = env.clusters.at(n);
    double per_chunk = 0.0;
    for (std::size_t k = 0; k < plan.delta.size(); ++k) {
        if (plan.delta[k] <= 0) continue;
        per_chunk += chunk_compute_energy(plan.delta[k], plan.micro_batch, cluster.devices[k], real.devices[k].clock_hz,
                                          cfg.model);
    }
    per_chunk += scheduling_energy(plan, cfg, env, n);
    return 2.0 * plan.m * per_chunk;
}

double event_sim_makespan(std::span<const double> stage_times, std::span<const double> hop_times, int m) {
    if (stage_times.empty() || stage_times.size() != hop_times.size())
        throw std::invalid_argument("event_sim_makespan: stage/hop lists must be non-empty and equal length");
    if (m < 1) throw std::invalid_argument("event_sim_makespan: m must be >= 1");

    const std::size_t S = stage_times.size();
    // free_at[k]: time stage k releases its previous chunk (compute + send done).
    std::vector<double> free_at(S, 0.0);
    double last_done = 0.0;
    for (int chunk = 0; chunk < m; ++chunk) {
        double arrival = 0.0;  // chunk enters stage 0 as soon as stage 0 is free
        for (std::size_t k = 0; k < S; ++k) {
            const double start = std::max(arrival, free_at[k]);
            const double released = start + stage_times[k] + hop_times[k];
            free_at[k] = released;
            arrival = released;
        }
        last_done = arrival;
    }
    return last_done - hop_times[S - 1];
}

std::vector<int> balanced_delta(int L, int S, int K) {
    if (S < 1 || S > K) throw std::invalid_argument("balanced_delta: need 1 <= S <= K");
    if (S > L) throw std::invalid_argument("balanced_delta: more segments than TEBs");
    std::vector<int> delta(K, 0);
    for (int k = 0; k < S; ++k) delta[k] = L / S + (k < L % S ? 1 : 0);
    return delta;
}

}  // namespace edgepipe
