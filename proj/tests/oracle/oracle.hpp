// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference solvers. They read the raw configuration and share
// no arithmetic with the production solvers.

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "edgepipe/config.hpp"
#include "edgepipe/environment.hpp"

namespace edgepipe::oracle {

struct SegmentOptimum {
    std::vector<int> delta;
    int S = 0;
    int m = 0;
    double objective = 0.0;
};

struct SegmentQuery {
    double queue = 0.0;
    double V = 1.0;
    double epsilon = 0.0;
    bool enforce_gamma = true;
};

/// Enumerates every delta composition and every m in [1, b]. Throws
/// std::domain_error beyond K <= 6, L <= 12, b <= 64. nullopt when infeasible.
std::optional<SegmentOptimum> brute_force_segment_plan(const SystemConfig& cfg, const RoundEnvironment& env, int n,
                                                       const SegmentQuery& query);

/// Objective V tau + Y S of a plan, recomputed from the raw config.
double segment_value(const SystemConfig& cfg, const RoundEnvironment& env, int n, const std::vector<int>& delta, int m,
                     const SegmentQuery& query);

struct AssignmentOptimum {
    std::vector<int> column_of_row;  // -1: virtual
    double cost = 0.0;
};

/// Enumerates every matching in which min(N, J) rows get distinct real
/// columns. Throws std::domain_error beyond N, J <= 6. Lexicographically
/// smallest optimal vector (virtual after every real column).
AssignmentOptimum brute_force_assignment(const std::vector<std::vector<double>>& cost);

struct GridPoint {
    double p = 0.0;
    double value = 0.0;
};

/// Argmin over p_i = P_max i / points, i = 1..points, of `objective` among
/// points where `feasible` holds. Ties go to the smallest p.
std::optional<GridPoint> grid_search_power(const std::function<double(double)>& objective,
                                           const std::function<bool(double)>& feasible, double power_max, long points);
std::optional<GridPoint> grid_search_power_parallel(const std::function<double(double)>& objective,
                                                    const std::function<bool(double)>& feasible, double power_max,
                                                    long points);

/// Scalar uplink sub-problem evaluated from first principles.
struct UplinkInstance {
    double V = 1.0, payload = 0.0, theta = 0.0;
    double B = 0.0, h = 0.0, I = 0.0, N0 = 0.0;
    double Y = 0.0, P_max = 0.0, E_max = 0.0, C = 0.0;
    double eps_cap = 0.0;  // +inf disables the balance constraint

    double value(double p) const;
    bool admissible(double p) const;
};

/// Discrete-event makespan of a blocking m-chunk pipeline.
double simulate_pipeline(const std::vector<double>& compute, const std::vector<double>& hops, int m);

}  // namespace edgepipe::oracle
