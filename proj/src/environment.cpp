// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include "edgepipe/environment.hpp"

#include <cmath>
#include <random>

namespace edgepipe {

namespace {

// splitmix64 finaliser; decorrelates (seed, round) before seeding the engine.
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double draw(std::mt19937_64& rng, Interval range) {
    if (range.lo == range.hi) {
        rng.discard(1);  // keep the stream aligned regardless of degenerate ranges
        return range.lo;
    }
    std::uniform_real_distribution<double> u(range.lo, range.hi);
    return u(rng);
}

}  // namespace

double mean_linear_gain(Interval db) noexcept {
    if (db.hi == db.lo) return std::pow(10.0, db.lo / 10.0);
    const double k = std::log(10.0) / 10.0;
    return (std::exp(k * db.hi) - std::exp(k * db.lo)) / (k * (db.hi - db.lo));
}

RoundEnvironment sample_round_environment(const SystemConfig& cfg, int round) {
    std::mt19937_64 rng(mix(cfg.rng_seed ^ mix(static_cast<std::uint64_t>(round))));

    RoundEnvironment env;
    env.round = round;
    env.clusters.reserve(cfg.clusters.size());
    for (const auto& c : cfg.clusters) {
        ClusterRealization cr;
        cr.uplink_gain.reserve(cfg.channels);
        for (int j = 0; j < cfg.channels; ++j) cr.uplink_gain.push_back(db_to_linear(draw(rng, c.uplink_gain_db)));
        cr.uplink_interference = draw(rng, c.uplink_interference);
        cr.devices.reserve(c.devices.size());
        for (const auto& d : c.devices) {
            DeviceRealization dr;
            dr.clock_hz = draw(rng, d.clock_hz);
            dr.d2d_gain = db_to_linear(draw(rng, c.d2d_gain_db));
            dr.d2d_interference = draw(rng, c.d2d_interference);
            cr.devices.push_back(dr);
        }
        env.clusters.push_back(std::move(cr));
    }
    return env;
}

}  // namespace edgepipe
