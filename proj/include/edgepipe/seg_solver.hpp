// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "edgepipe/config.hpp"
#include "edgepipe/environment.hpp"
#include "edgepipe/pipeline.hpp"

namespace edgepipe {

/// Relative tolerance under which two objective values count as tied.
inline constexpr double kTieTolerance = 1e-12;

bool nearly_equal(double a, double b, double rel = kTieTolerance) noexcept;

/// Everything the segment scheduler needs about one cluster in one round,
/// flattened to per-device arrays.
struct SegmentProblem {
    std::vector<double> speed;           // phi_k f_k(t) [FLOP/s]
    std::vector<double> hop;             // tau_k^dd when S > 1 [s]
    std::vector<double> hop_energy;      // p_k tau_k^dd [J]
    std::vector<double> energy_per_flop; // kappa f_k^2 / phi_k [J/FLOP]
    std::vector<double> energy_budget;   // E_k^max [J]
    std::vector<int> capacity;           // floor(gamma_k^max / gamma_0)

    int L = 1;
    int batch_size = 1;
    double o_fwd = 0.0;
    double o_bwd = 0.0;

    double V = 1.0;
    double queue = 0.0;                  // Y_n

    // C11 at fixed CU power.
    bool enforce_gamma = true;
    ConvergenceParams convergence;
    int N = 1;
    double epsilon = 0.0;                // eps_n(p_n)

    int devices() const noexcept { return static_cast<int>(speed.size()); }

    static SegmentProblem from(const SystemConfig& cfg, const RoundEnvironment& env, int n, double queue,
                               double V, double epsilon, bool enforce_gamma = true);
};

/// V tau_pipe + Y S for a complete plan. Does not check feasibility.
double segment_objective(const SegmentProblem& problem, const std::vector<int>& delta, int m);

/// "" when (delta, m) satisfies C1, C2, C7, C9' and (if enforced) C11.
std::string segment_violation(const SegmentProblem& problem, const std::vector<int>& delta, int m);

/// Continuous minimiser sqrt((S-1) A / B) of (S + m - 1)(A/m + B).
double stationary_micro_batches(int S, double A, double B);

struct MicroBatchChoice {
    int m = 1;
    double objective = 0.0;
    double stationary = 1.0;  // m~ of the bottleneck device
};

/// Optimal m for a fixed partition. Throws InfeasibleError if no m passes C9'.
MicroBatchChoice optimal_micro_batches(const SegmentProblem& problem, const std::vector<int>& delta);

struct PartitionChoice {
    std::vector<int> delta;
    int S = 0;
    double objective = 0.0;
    long nodes = 0;  // branch-and-bound nodes expanded
};

/// Exact minimiser over integer partitions for a fixed m, by branch and bound.
/// Ties: smaller S, then lexicographically smaller delta.
PartitionChoice optimal_partition(const SegmentProblem& problem, int m);

struct SegmentSchedule {
    SegmentPlan plan;
    double objective = 0.0;
    int iterations = 0;              // total AO sweeps over all starts
    std::vector<double> trajectory;  // objective after each sweep of the winning start
};

/// Alternating optimisation of (delta, S) and m, multi-started over the
/// micro-batch breakpoints. Throws InfeasibleError naming the constraint.
SegmentSchedule schedule_segments(const SegmentProblem& problem);

/// Minimal m for each distinct ceil(b/m), ascending.
std::vector<int> micro_batch_breakpoints(int b);

}  // namespace edgepipe
