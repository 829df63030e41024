// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace edgepipe {

/// Closed interval used for per-round sampled quantities. lo == hi is a point.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double mid() const noexcept { return 0.5 * (lo + hi); }
};

/// Encoder description. All data sizes are in bits, work in FLOPs.
struct ModelSpec {
    int L = 12;                      // Transformer encoder blocks
    double o_fwd = 2e6;              // forward FLOPs per TEB per micro-batch item
    double o_bwd = 2e6;              // backward FLOPs per TEB per chunk
    double act_size_seg = 2e5;       // z^s
    double grad_size_seg = 2e5;      // g^s
    double act_size_enc = 2.5e5;     // z_n^enc
    double enc_param_size = 1e6;     // theta_n^enc
    int batch_size = 64;             // b
};

struct DeviceProfile {
    double flops_per_cycle = 10.0;   // phi_k
    Interval clock_hz{1e8, 8e8};     // f_k range
    double d2d_power = 0.1;          // p_k [W]
    double d2d_power_max = 0.18;     // P_k^max [W]
    double mem_budget = 1.5e9;       // gamma_k^max [bytes]
    double mem_per_teb = 2.5e8;      // gamma_0 [bytes]
    double energy_budget = 5.0;      // E_k^max [J]
    double capacitance = 1e-28;      // kappa, effective switched capacitance

    /// Largest TEB count satisfying the memory budget (C7).
    int max_tebs() const noexcept;
};

struct ClusterProfile {
    std::vector<DeviceProfile> devices;
    double cu_power_max = 0.5;       // P_n^max [W]
    double cu_energy_budget = 10.0;  // E_n^max [J]
    double uplink_bandwidth = 5e5;   // B_n^U [Hz]
    double d2d_bandwidth = 5e5;      // B^dd [Hz]
    Interval uplink_gain_db{-0.12, -0.08};
    Interval d2d_gain_db{-30.0, -30.0};
    Interval uplink_interference{0.06, 0.08};  // I_i [W]
    Interval d2d_interference{5e-10, 5e-10};   // I_dd [W]
};

struct ConvergenceParams {
    double beta = 1.0;
    double eta = 0.01;
    double xi = 0.5;
    double phi_bound = 1.0;
    double C = 0.0;                  // 0 means "derive default at load time"
    double gamma_max = 1.0;
    double V = 10.0;
    double initial_gap = 1.0;        // F(theta(0)) - F(theta*)
};

/// Parameters of the synthetic loss proxy driving the loss-only baseline.
struct BaselineParams {
    double loss_amplitude = 5.0;
    double loss_decay_rounds = 50.0;
    double loss_noise = 0.2;
};

struct SystemConfig {
    std::vector<ClusterProfile> clusters;
    int channels = 4;                // J
    ModelSpec model;
    double noise_density = 3.981071705534972e-21;  // N_0 [W/Hz] (-174 dBm/Hz)
    ConvergenceParams convergence;
    BaselineParams baselines;
    std::uint64_t rng_seed = 1;

    int num_clusters() const noexcept { return static_cast<int>(clusters.size()); }
};

/// Reads, defaults and validates a JSON config. Honors EDGEPIPE_SEED.
SystemConfig load_config(const std::filesystem::path& path);

/// Builds a validated config from an in-memory JSON document.
SystemConfig parse_config(const nlohmann::json& doc);

/// Checks every invariant of an assembled config. Throws ConfigError naming
/// the offending field.
void validate(const SystemConfig& cfg);

/// Default interference-error constant so that eps(P^max) ~= 0.1 phi^2,
/// evaluated at the mid-point channel of the average cluster.
double default_interference_constant(const SystemConfig& cfg);

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;
double dbm_per_hz_to_w_per_hz(double dbm) noexcept;

}  // namespace edgepipe
