// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include "edgepipe/kernels.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include "edgepipe/pipeline.hpp"

namespace edgepipe {

std::vector<SegmentSchedule> schedule_all_clusters(const std::vector<SegmentProblem>& problems, Exec exec) {
    const int N = static_cast<int>(problems.size());
    std::vector<SegmentSchedule> out(N);
    std::vector<std::exception_ptr> errors(N);

    if (exec == Exec::serial) {
        for (int n = 0; n < N; ++n) out[n] = schedule_segments(problems[n]);
        return out;
    }

#pragma omp parallel for schedule(dynamic, 1)
    for (int n = 0; n < N; ++n) {
        try {
            out[n] = schedule_segments(problems[n]);
        } catch (...) {
            errors[n] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

namespace {

double grid_cell(const SystemConfig& cfg, const RoundEnvironment& env, int n, int S, int m) {
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    const auto& cluster = cfg.clusters.at(n);
    const int K = static_cast<int>(cluster.devices.size());
    if (S < 1 || S > K || S > cfg.model.L || m < 1 || m > cfg.model.batch_size) return kNaN;
    const auto plan = SegmentPlan::make(balanced_delta(cfg.model.L, S, K), m, cfg.model.batch_size);
    if (!plan_violation(plan, cluster, cfg.model).empty()) return kNaN;
    return pipeline_latency(plan, cfg, env, n);
}

}  // namespace

LatencyGrid uniform_latency_grid(const SystemConfig& cfg, const RoundEnvironment& env, int n,
                                 const std::vector<int>& S_values, const std::vector<int>& m_values, Exec exec) {
    LatencyGrid grid{S_values, m_values, std::vector<double>(S_values.size() * m_values.size())};
    const long cells = static_cast<long>(grid.tau.size());
    const long width = static_cast<long>(m_values.size());
    std::vector<std::exception_ptr> errors(cells);

    if (exec == Exec::serial) {
        for (long c = 0; c < cells; ++c) grid.tau[c] = grid_cell(cfg, env, n, S_values[c / width], m_values[c % width]);
        return grid;
    }

#pragma omp parallel for schedule(static)
    for (long c = 0; c < cells; ++c) {
        try {
            grid.tau[c] = grid_cell(cfg, env, n, S_values[c / width], m_values[c % width]);
        } catch (...) {
            errors[c] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return grid;
}

}  // namespace edgepipe
