// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "edgepipe/config.hpp"
#include "edgepipe/environment.hpp"

namespace edgepipe::test {

inline std::filesystem::path config_path(const std::string& name) {
    return std::filesystem::path(EDGEPIPE_CONFIG_DIR) / name;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::path(EDGEPIPE_TEST_TMP) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline bool close_rel(double a, double b, double rel) {
    return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

/// A single-cluster system whose devices have fixed clocks, so the
/// environment is deterministic up to the channel draws.
inline SystemConfig homogeneous_system(int K, int L, int b, double phi = 10.0, double clock = 2e8) {
    SystemConfig cfg;
    cfg.channels = 1;
    cfg.model.L = L;
    cfg.model.batch_size = b;
    ClusterProfile c;
    DeviceProfile d;
    d.flops_per_cycle = phi;
    d.clock_hz = {clock, clock};
    c.devices.assign(K, d);
    c.uplink_gain_db = {-0.1, -0.1};
    c.uplink_interference = {0.07, 0.07};
    cfg.clusters.push_back(c);
    cfg.convergence.gamma_max = 1.0;
    cfg.convergence.C = default_interference_constant(cfg);
    return cfg;
}

/// Random small heterogeneous cluster system drawn from `rng`.
inline SystemConfig random_system(std::mt19937_64& rng, int N, int K_max, int L_max, int b_max, int J = 1) {
    auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto I = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    SystemConfig cfg;
    cfg.channels = J;
    cfg.rng_seed = rng();
    cfg.model.L = I(1, L_max);
    cfg.model.batch_size = I(1, b_max);
    cfg.model.o_fwd = U(1e6, 3e6);
    cfg.model.o_bwd = U(1e6, 3e6);
    cfg.model.act_size_seg = U(5e4, 4e5);
    cfg.model.grad_size_seg = U(5e4, 4e5);
    for (int n = 0; n < N; ++n) {
        ClusterProfile c;
        const int K = I(1, K_max);
        for (int k = 0; k < K; ++k) {
            DeviceProfile d;
            d.flops_per_cycle = U(10, 24);
            const double f = U(1e8, 8e8);
            d.clock_hz = {f, f};
            d.d2d_power = U(0.07, 0.1);
            d.mem_per_teb = 2.5e8;
            d.mem_budget = 2.5e8 * I(1, cfg.model.L + 1);
            d.capacitance = 1e-28;
            c.devices.push_back(d);
        }
        c.uplink_bandwidth = U(4e5, 6e5);
        const double g = U(-33, -27);
        c.d2d_gain_db = {g, g};
        cfg.clusters.push_back(c);
    }
    cfg.convergence.gamma_max = 1.0;
    cfg.convergence.C = default_interference_constant(cfg);
    return cfg;
}

}  // namespace edgepipe::test
