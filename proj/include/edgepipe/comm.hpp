// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "edgepipe/config.hpp"
#include "edgepipe/environment.hpp"

namespace edgepipe {

/// Arguments of a Shannon-rate evaluation.
struct LinkBudget {
    double bandwidth = 0.0;      // Hz
    double tx_power = 0.0;       // W
    double gain = 0.0;           // linear
    double interference = 0.0;   // W
    double noise_density = 0.0;  // W/Hz
};

/// Binary N x J channel matrix, stored as one channel index per CU.
/// `kUnassigned` marks a CU parked on a virtual channel.
class ChannelAssignment {
public:
    static constexpr int kUnassigned = -1;

    ChannelAssignment() = default;
    ChannelAssignment(int clusters, int channels);

    int clusters() const noexcept { return static_cast<int>(channel_of_.size()); }
    int channels() const noexcept { return channels_; }

    std::optional<int> channel(int n) const;
    bool transmitting(int n) const { return channel_of_.at(n) != kUnassigned; }
    void assign(int n, int j);
    void unassign(int n) { channel_of_.at(n) = kUnassigned; }

    /// I_{n,j}
    int indicator(int n, int j) const { return channel_of_.at(n) == j ? 1 : 0; }

    /// Binary entries, column sums <= 1 (C5), row sums <= 1.
    bool structurally_valid() const;
    const std::vector<int>& raw() const noexcept { return channel_of_; }

    friend bool operator==(const ChannelAssignment&, const ChannelAssignment&) = default;

private:
    std::vector<int> channel_of_;
    int channels_ = 0;
};

/// r = B log2(1 + p h / (I + B N0)).
double uplink_rate(const LinkBudget& link);

/// Uplink budget for CU n on channel j at power p in this round.
LinkBudget uplink_link(const SystemConfig& cfg, const RoundEnvironment& env, int n, int j, double power);

/// tau_n^Up, or nullopt when the CU sits on a virtual channel.
/// Throws LinkError for a zero-rate link with a nonzero payload.
std::optional<double> uplink_delay(const SystemConfig& cfg, const RoundEnvironment& env,
                                   const ChannelAssignment& assignment, int n, double power);

/// E_n^com = p * theta_enc / r. Zero for a CU that is not transmitting.
double cu_transmit_energy(const SystemConfig& cfg, const RoundEnvironment& env,
                          const ChannelAssignment& assignment, int n, double power);

/// D2D budget of device k in cluster n (B^dd, realized h_dd and I_dd).
LinkBudget d2d_link(const SystemConfig& cfg, const RoundEnvironment& env, int n, int k, double power);

/// tau^dd for an explicit link; the cluster only enters through the budget.
double d2d_delay(const LinkBudget& link, const ModelSpec& model);

/// tau_k^dd = (z^s + g^{s+1}) / r_dd. Throws LinkError on a dead link (p = 0).
double d2d_delay(const SystemConfig& cfg, const RoundEnvironment& env, int n, int k, double power);

/// E_k^sch = p_k tau_k^dd.
double d2d_energy(const SystemConfig& cfg, const RoundEnvironment& env, int n, int k, double power);

/// Payload-over-rate helper shared by the delay functions.
double transfer_time(double payload_bits, double rate_bps);

}  // namespace edgepipe
