// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <random>

#include "edgepipe/res_solver.hpp"
#include "oracle.hpp"

namespace edgepipe::test {

/// Random uplink power instance in two matching forms: the production
/// problem and the oracle's first-principles description.
struct PowerCase {
    PowerProblem problem;
    oracle::UplinkInstance instance;
};

inline PowerCase random_power_case(std::mt19937_64& rng) {
    auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    oracle::UplinkInstance u;
    u.V = U(0.1, 20);
    u.theta = U(5e5, 2e6);
    u.payload = u.theta + U(1e5, 5e5);
    u.B = U(3e5, 7e5);
    u.h = std::pow(10.0, U(-0.3, 0.0));
    u.I = U(0.05, 0.09);
    u.N0 = 3.981071705534972e-21;
    u.Y = std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? 0.0 : std::pow(10.0, U(-2, 2));
    u.P_max = U(0.1, 1.0);
    u.C = U(0.005, 0.05);
    const double a = u.h / (u.I + u.B * u.N0);
    const double e0 = u.theta * std::log(2.0) / (u.B * a);
    const double ePmax = u.P_max * u.theta / (u.B * std::log2(1 + a * u.P_max));
    u.E_max = std::uniform_int_distribution<int>(0, 1)(rng) ? U(e0 * 1.01, ePmax) : ePmax * 2;
    u.eps_cap = std::uniform_int_distribution<int>(0, 2)(rng) == 0 ? std::numeric_limits<double>::infinity() : u.C / (U(0.0, 0.95) * u.P_max * u.h + u.I);

    PowerProblem p;
    p.numerator = u.V * u.payload;
    p.bandwidth = u.B;
    p.gain = u.h;
    p.interference = u.I;
    p.noise_density = u.N0;
    p.queue = u.Y;
    p.power_max = u.P_max;
    p.energy_max = u.E_max;
    p.param_bits = u.theta;
    p.C = u.C;
    p.epsilon_cap = u.eps_cap;
    return {p, u};
}

}  // namespace edgepipe::test
