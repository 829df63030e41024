// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

// Serial reference vs OpenMP variants of the data-parallel kernels.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "edgepipe/kernels.hpp"
#include "oracle.hpp"

using namespace edgepipe;

namespace {

SystemConfig wide_system(int clusters, int devices) {
    SystemConfig cfg;
    cfg.channels = clusters;
    cfg.model.L = 12;
    cfg.model.batch_size = 64;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int n = 0; n < clusters; ++n) {
        ClusterProfile c;
        for (int k = 0; k < devices; ++k) {
            DeviceProfile d;
            d.flops_per_cycle = 10 + 14 * U(rng);
            const double f = 1e8 + 7e8 * U(rng);
            d.clock_hz = {f, f};
            d.mem_budget = 2.5e8 * 12;
            c.devices.push_back(d);
        }
        cfg.clusters.push_back(c);
    }
    cfg.convergence.gamma_max = 1.0;
    cfg.convergence.C = default_interference_constant(cfg);
    return cfg;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_ScheduleAllClusters(benchmark::State& state) {
    const auto cfg = wide_system(16, 6);
    const auto env = sample_round_environment(cfg, 1);
    std::vector<SegmentProblem> problems;
    for (int n = 0; n < cfg.num_clusters(); ++n)
        problems.push_back(SegmentProblem::from(cfg, env, n, 0.1, 10.0, 0.0, false));
    for (auto _ : state) benchmark::DoNotOptimize(schedule_all_clusters(problems, exec_of(state)));
}
BENCHMARK(BM_ScheduleAllClusters)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_LatencyGrid(benchmark::State& state) {
    const auto cfg = wide_system(1, 6);
    const auto env = sample_round_environment(cfg, 1);
    std::vector<int> S{1, 2, 3, 4, 5, 6}, m;
    for (int i = 1; i <= 64; ++i) m.push_back(i);
    for (auto _ : state) benchmark::DoNotOptimize(uniform_latency_grid(cfg, env, 0, S, m, exec_of(state)));
}
BENCHMARK(BM_LatencyGrid)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_PowerGrid(benchmark::State& state) {
    oracle::UplinkInstance u;
    u.V = 10;
    u.payload = 1.25e6;
    u.theta = 1e6;
    u.B = 5e5;
    u.h = 0.98;
    u.I = 0.07;
    u.N0 = 3.981071705534972e-21;
    u.Y = 1.0;
    u.P_max = 0.5;
    u.E_max = 10.0;
    u.eps_cap = INFINITY;
    auto f = [&](double p) { return u.value(p); };
    auto ok = [&](double p) { return u.admissible(p); };
    for (auto _ : state) {
        if (state.range(0) == 0)
            benchmark::DoNotOptimize(oracle::grid_search_power(f, ok, u.P_max, 100000));
        else
            benchmark::DoNotOptimize(oracle::grid_search_power_parallel(f, ok, u.P_max, 100000));
    }
}
BENCHMARK(BM_PowerGrid)->Arg(0)->Arg(1)->ArgName("parallel");

}  // namespace

BENCHMARK_MAIN();
