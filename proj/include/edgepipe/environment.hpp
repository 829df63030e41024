// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "edgepipe/config.hpp"

namespace edgepipe {

struct DeviceRealization {
    double clock_hz = 0.0;     // f_k(t)
    double d2d_gain = 0.0;     // linear
    double d2d_interference = 0.0;
};

struct ClusterRealization {
    std::vector<double> uplink_gain;   // h_{n,j}(t), one per channel, linear
    double uplink_interference = 0.0;  // I_i(t)
    std::vector<DeviceRealization> devices;
};

/// One round's channel and compute state. A pure function of (seed, t).
struct RoundEnvironment {
    int round = 1;
    std::vector<ClusterRealization> clusters;
};

RoundEnvironment sample_round_environment(const SystemConfig& cfg, int round);

/// Mean of 10^(U/10) for U ~ Uniform[lo_db, hi_db].
double mean_linear_gain(Interval db) noexcept;

}  // namespace edgepipe
