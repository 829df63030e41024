// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "edgepipe/comm.hpp"
#include "edgepipe/config.hpp"
#include "edgepipe/environment.hpp"
#include "edgepipe/lyapunov.hpp"

namespace edgepipe {

/// One CU's power-control sub-problem on a fixed channel:
///   min_p  A / (B f(p)) + Y p,   f(p) = log2(1 + p h / (I + B N0))
///   s.t.   0 < p <= P^max,  p theta / (B f(p)) <= E^max (C8),  eps(p) <= eps_cap (C11).
struct PowerProblem {
    double numerator = 0.0;     // A = V (z_enc + theta_enc)
    double bandwidth = 0.0;     // B_n^U
    double gain = 0.0;          // h_{n,j}
    double interference = 0.0;  // I_i
    double noise_density = 0.0;
    double queue = 0.0;         // Y_n
    double power_max = 0.0;     // P_n^max
    double energy_max = 0.0;    // E_n^max
    double param_bits = 0.0;    // theta_enc
    double C = 0.0;
    double epsilon_cap = 0.0;   // +inf disables C11

    static PowerProblem from(const SystemConfig& cfg, const RoundEnvironment& env, int n, int j, int S,
                             double queue, double V, bool enforce_gamma = true);

    double spectral_efficiency(double p) const;   // f(p)
    double spectral_slope(double p) const;        // f'(p)
    double objective(double p) const;
    double energy(double p) const;                // C8 left-hand side
    double epsilon(double p) const;               // C11 left-hand side
    bool feasible(double p, double rel_slack = 0.0) const;
};

struct PowerSolution {
    double power = 0.0;
    double objective = 0.0;
    int dinkelbach_iterations = 0;
    int sca_iterations = 0;
};

/// Dinkelbach outer loop over a successive-convex-approximation inner loop
/// with C8 and C11 linearised at the current iterate. Throws InfeasibleError
/// ("C11" or "C8") when no admissible power exists.
PowerSolution power_control(const PowerProblem& problem);

/// Channel matching at fixed powers. cost(n, j) = V tau_up(n, j) + Y_n p_n.
ChannelAssignment channel_assignment(const SystemConfig& cfg, const RoundEnvironment& env,
                                     const std::vector<double>& powers, const QueueState& queues, double V);

struct ResourceAllocation {
    ChannelAssignment assignment;
    std::vector<double> powers;
    double upsilon = 0.0;
    int iterations = 0;
    std::vector<double> trajectory;  // Upsilon after each accepted iteration
};

/// Alternates channel matching and per-CU power control until Upsilon is
/// stable. `segments[n]` is cluster n's S, used by C11.
ResourceAllocation allocate_resources(const SystemConfig& cfg, const RoundEnvironment& env,
                                      const std::vector<int>& segments, const QueueState& queues, double V,
                                      bool enforce_gamma = true);

/// Upsilon for an explicit assignment and power vector.
double upsilon_value(const SystemConfig& cfg, const RoundEnvironment& env, const ChannelAssignment& assignment,
                     const std::vector<double>& powers, const QueueState& queues, double V);

}  // namespace edgepipe
