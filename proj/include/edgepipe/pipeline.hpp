// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "edgepipe/config.hpp"
#include "edgepipe/environment.hpp"

namespace edgepipe {

/// TEB-wise partition of the encoder over one cluster's devices, plus the
/// micro-batching used to pipeline it.
struct SegmentPlan {
    std::vector<int> delta;  // TEBs per device, zeros allowed
    int S = 0;               // scheduled devices
    int m = 1;               // micro-batches
    int micro_batch = 0;     // b_hat

    /// Builds a plan, deriving S and b_hat.
    static SegmentPlan make(std::vector<int> delta, int m, int batch_size);

    friend bool operator==(const SegmentPlan&, const SegmentPlan&) = default;
};

/// Checks C1, C2, C7 and the b_hat relation. Returns an empty string when the
/// plan is valid, otherwise the name of the first violated constraint.
std::string plan_violation(const SegmentPlan& plan, const ClusterProfile& cluster, const ModelSpec& model);

/// b_hat = ceil(b / m). Throws std::invalid_argument unless 1 <= m <= b.
int micro_batch_size(int b, int m);

/// delta_k (b_hat o_fwd + o_bwd) / (phi_k f_k).
double stage_time(int delta, int micro_batch, double flops_per_cycle, double clock_hz, const ModelSpec& model);

/// Per-device timing of one chunk: compute and outgoing D2D hop.
struct StageTiming {
    double compute = 0.0;
    double hop = 0.0;
};

/// Timing of every scheduled device (delta_k > 0) of cluster n in pipeline
/// order. Hops are zero when S == 1.
std::vector<StageTiming> stage_timings(const SegmentPlan& plan, const SystemConfig& cfg,
                                       const RoundEnvironment& env, int n);

/// (S + m - 1) max_k(t_k + d_k) - d_last, the closed-form pipeline latency.
double pipeline_latency(std::span<const StageTiming> stages, int m);
double pipeline_latency(const SegmentPlan& plan, const SystemConfig& cfg, const RoundEnvironment& env, int n);

/// Compute energy of one device for one chunk (the C9' compute term).
double chunk_compute_energy(int delta, int micro_batch, const DeviceProfile& device, double clock_hz,
                            const ModelSpec& model);

/// E_n^pipe = 2m sum_k [kappa delta_k (b_hat o + o') f_k^2 / phi_k + E_k^sch].
double pipeline_energy(const SegmentPlan& plan, const SystemConfig& cfg, const RoundEnvironment& env, int n);

/// Sum over scheduled devices of E_k^sch for one chunk.
double scheduling_energy(const SegmentPlan& plan, const SystemConfig& cfg, const RoundEnvironment& env, int n);

/// Exact makespan of a GPipe-style schedule: m chunks traverse the stages in
/// order, a stage holds a chunk for compute plus its outgoing hop, and the
/// final stage's hop is not part of the pipeline.
double event_sim_makespan(std::span<const double> stage_times, std::span<const double> hop_times, int m);

/// Balanced split of L TEBs over the first S eligible devices (differences <= 1).
std::vector<int> balanced_delta(int L, int S, int K);

}  // namespace edgepipe
