// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include "edgepipe/comm.hpp"

#include <cmath>
#include <numbers>
#include <limits>
#include <stdexcept>

#include "edgepipe/errors.hpp"

namespace edgepipe {

ChannelAssignment::ChannelAssignment(int clusters, int channels)
    : channel_of_(clusters, kUnassigned), channels_(channels) {}

std::optional<int> ChannelAssignment::channel(int n) const {
    const int j = channel_of_.at(n);
    if (j == kUnassigned) return std::nullopt;
    return j;
}

void ChannelAssignment::assign(int n, int j) {
    if (j < 0 || j >= channels_) throw std::out_of_range("channel index out of range");
    channel_of_.at(n) = j;
}

bool ChannelAssignment::structurally_valid() const {
    std::vector<int> used(channels_, 0);
    for (int j : channel_of_) {
        if (j == kUnassigned) continue;
        if (j < 0 || j >= channels_) return false;
        if (++used[j] > 1) return false;
    }
    return true;
}

double uplink_rate(const LinkBudget& link) {
    if (link.tx_power <= 0.0) return 0.0;
    const double sinr = link.tx_power * link.gain / (link.interference + link.bandwidth * link.noise_density);
    return link.bandwidth * std::log1p(sinr) / std::numbers::ln2;
}

double transfer_time(double payload_bits, double rate_bps) {
    if (payload_bits <= 0.0) return 0.0;
    if (!(rate_bps > 0.0)) throw LinkError("stalled link: zero rate with nonzero payload");
    return payload_bits / rate_bps;
}

LinkBudget uplink_link(const SystemConfig& cfg, const RoundEnvironment& env, int n, int j, double power) {
    const auto& c = cfg.clusters.at(n);
    const auto& r = env.clusters.at(n);
    return LinkBudget{c.uplink_bandwidth, power, r.uplink_gain.at(j), r.uplink_interference, cfg.noise_density};
}

std::optional<double> uplink_delay(const SystemConfig& cfg, const RoundEnvironment& env,
                                   const ChannelAssignment& assignment, int n, double power) {
    const auto j = assignment.channel(n);
    if (!j) return std::nullopt;
    const double rate = uplink_rate(uplink_link(cfg, env, n, *j, power));
    const double payload = cfg.model.act_size_enc + cfg.model.enc_param_size;
    if (!(rate > 0.0)) throw LinkError("stalled uplink: cluster " + std::to_string(n) + " has zero rate");
    return transfer_time(payload, rate);
}

double cu_transmit_energy(const SystemConfig& cfg, const RoundEnvironment& env, const ChannelAssignment& assignment,
                          int n, double power) {
    const auto j = assignment.channel(n);
    if (!j || power <= 0.0) return 0.0;
    const double rate = uplink_rate(uplink_link(cfg, env, n, *j, power));
    if (!(rate > 0.0)) throw LinkError("stalled uplink: cluster " + std::to_string(n) + " has zero rate");
    return power * transfer_time(cfg.model.enc_param_size, rate);
}

LinkBudget d2d_link(const SystemConfig& cfg, const RoundEnvironment& env, int n, int k, double power) {
    const auto& dev = env.clusters.at(n).devices.at(k);
    return LinkBudget{cfg.clusters.at(n).d2d_bandwidth, power, dev.d2d_gain, dev.d2d_interference, cfg.noise_density};
}

double d2d_delay(const LinkBudget& link, const ModelSpec& model) {
    if (link.tx_power <= 0.0) throw LinkError("dead D2D link: zero transmit power");
    const double rate = uplink_rate(link);
    if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
    return (model.act_size_seg + model.grad_size_seg) / rate;
}

double d2d_delay(const SystemConfig& cfg, const RoundEnvironment& env, int n, int k, double power) {
    return d2d_delay(d2d_link(cfg, env, n, k, power), cfg.model);
}

double d2d_energy(const SystemConfig& cfg, const RoundEnvironment& env, int n, int k, double power) {
    return power * d2d_delay(cfg, env, n, k, power);
}

}  // namespace edgepipe
