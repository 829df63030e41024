// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include "edgepipe/res_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "edgepipe/convergence.hpp"
#include "edgepipe/errors.hpp"
#include "edgepipe/hungarian.hpp"

namespace edgepipe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxDinkelbach = 100;
constexpr int kMaxSca = 100;
constexpr int kBisectionSteps = 200;
constexpr double kDinkelbachResidual = 1e-10;

// Root of a monotone predicate on [lo, hi]: returns the boundary between
// `pred == true` (left) and `pred == false` (right).
template <class Pred>
double bisect(double lo, double hi, Pred pred) {
    for (int i = 0; i < kBisectionSteps && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (pred(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

PowerProblem PowerProblem::from(const SystemConfig& cfg, const RoundEnvironment& env, int n, int j, int S,
                                double queue, double V, bool enforce_gamma) {
    const auto& cluster = cfg.clusters.at(n);
    const auto& real = env.clusters.at(n);
    PowerProblem p;
    p.numerator = V * (cfg.model.act_size_enc + cfg.model.enc_param_size);
    p.bandwidth = cluster.uplink_bandwidth;
    p.gain = real.uplink_gain.at(j);
    p.interference = real.uplink_interference;
    p.noise_density = cfg.noise_density;
    p.queue = queue;
    p.power_max = cluster.cu_power_max;
    p.energy_max = cluster.cu_energy_budget;
    p.param_bits = cfg.model.enc_param_size;
    p.C = cfg.convergence.C;
    p.epsilon_cap = enforce_gamma ? edgepipe::epsilon_cap(S, cfg.convergence, cfg.num_clusters(), cfg.model.L) : kInf;
    return p;
}

double PowerProblem::spectral_efficiency(double p) const {
    return std::log1p(p * gain / (interference + bandwidth * noise_density)) / std::numbers::ln2;
}

double PowerProblem::spectral_slope(double p) const {
    const double a = gain / (interference + bandwidth * noise_density);
    return a / ((1.0 + a * p) * std::numbers::ln2);
}

double PowerProblem::objective(double p) const {
    if (p <= 0.0) return kInf;
    return numerator / (bandwidth * spectral_efficiency(p)) + queue * p;
}

double PowerProblem::energy(double p) const {
    if (p <= 0.0) {
        // Limit p / log2(1 + a p) -> ln2 / a.
        const double a = gain / (interference + bandwidth * noise_density);
        return param_bits * std::numbers::ln2 / (bandwidth * a);
    }
    return p * param_bits / (bandwidth * spectral_efficiency(p));
}

double PowerProblem::epsilon(double p) const { return interference_error(p, gain, interference, C); }

bool PowerProblem::feasible(double p, double rel_slack) const {
    if (p <= 0.0 || p > power_max * (1.0 + rel_slack)) return false;
    if (energy(p) > energy_max * (1.0 + rel_slack)) return false;
    if (std::isfinite(epsilon_cap) && epsilon(p) > epsilon_cap * (1.0 + rel_slack) + 0.0) return false;
    return true;
}

namespace {

// Dinkelbach on [lo, hi] for  min (A + Y p D(p)) / D(p),  D = B f(p).
// Each parametric step minimises A + (Y p - lambda) D(p), which is convex,
// by bisection on its derivative.
double dinkelbach(const PowerProblem& P, double lo, double hi, int& iterations) {
    const double B = P.bandwidth;
    auto D = [&](double p) { return B * P.spectral_efficiency(p); };
    auto dD = [&](double p) { return B * P.spectral_slope(p); };
    auto Nf = [&](double p) { return P.numerator + P.queue * p * D(p); };

    double p = hi;
    double lambda = Nf(p) / D(p);
    for (int it = 0; it < kMaxDinkelbach; ++it) {
        ++iterations;
        auto slope = [&](double x) { return P.queue * D(x) + (P.queue * x - lambda) * dD(x); };
        double next;
        if (slope(hi) <= 0.0) {
            next = hi;
        } else if (slope(lo) >= 0.0) {
            next = lo;
        } else {
            next = bisect(lo, hi, [&](double x) { return slope(x) < 0.0; });
        }
        const double residual = Nf(next) - lambda * D(next);
        p = next;
        lambda = Nf(p) / D(p);
        if (std::fabs(residual) <= kDinkelbachResidual * Nf(p)) break;
    }
    return p;
}

}  // namespace

PowerSolution power_control(const PowerProblem& P) {
    const bool gamma_on = std::isfinite(P.epsilon_cap);
    if (gamma_on && !(P.epsilon(P.power_max) <= P.epsilon_cap))
        throw InfeasibleError("C11", "balance bound unreachable even at P_max");
    if (P.energy(0.0) > P.energy_max)
        throw InfeasibleError("C8", "uplink energy budget below the zero-power limit");

    const double floor = P.power_max * 1e-12;
    PowerSolution out;

    // SCA: linearise C8 (through f) and C11 (through eps) at the current iterate.
    double p = P.power_max;
    for (int it = 0; it < kMaxSca; ++it) {
        ++out.sca_iterations;
        double lo = floor;
        double hi = P.power_max;

        // C8'': p theta <= E B [f(pe) + f'(pe)(p - pe)]
        const double f0 = P.spectral_efficiency(p);
        const double f1 = P.spectral_slope(p);
        const double coef = P.param_bits - P.energy_max * P.bandwidth * f1;
        const double rhs = P.energy_max * P.bandwidth * (f0 - f1 * p);
        if (coef > 0.0) hi = std::min(hi, rhs / coef);

        // C11': eps(pe) + eps'(pe)(p - pe) <= cap, eps' < 0
        if (gamma_on && P.C > 0.0) {
            const double e0 = P.epsilon(p);
            const double e1 = -P.C * P.gain / std::pow(p * P.gain + P.interference, 2);
            lo = std::max(lo, p + (P.epsilon_cap - e0) / e1);
        }
        if (lo > hi) lo = hi;

        const double next = dinkelbach(P, lo, hi, out.dinkelbach_iterations);
        const bool done = std::fabs(next - p) < 1e-9 * P.power_max;
        p = next;
        if (done) break;
    }

    // Certification against the true constraints.
    if (P.energy(p) > P.energy_max) {
        p = bisect(floor, p, [&](double x) { return P.energy(x) <= P.energy_max; });
    }
    if (gamma_on && P.epsilon(p) > P.epsilon_cap) {
        // eps is decreasing: its boundary has a closed form.
        p = std::clamp((P.C / P.epsilon_cap - P.interference) / P.gain, floor, P.power_max);
        while (P.epsilon(p) > P.epsilon_cap && p < P.power_max) p = std::nextafter(p, P.power_max);
    }
    if (P.energy(p) > P.energy_max * (1.0 + 1e-9))
        throw InfeasibleError("C8", "no power satisfies both the energy budget and the balance bound");
    out.power = p;
    out.objective = P.objective(p);
    return out;
}

namespace {

double pair_cost(const SystemConfig& cfg, const RoundEnvironment& env, int n, int j, double power,
                 const QueueState& queues, double V) {
    const double rate = uplink_rate(uplink_link(cfg, env, n, j, power));
    const double payload = cfg.model.act_size_enc + cfg.model.enc_param_size;
    return V * transfer_time(payload, rate) + queues.Y.at(n) * power;
}

ChannelAssignment to_assignment(const AssignmentResult& r, int N, int J) {
    ChannelAssignment a(N, J);
    for (int n = 0; n < N; ++n)
        if (r.column_of_row[n] >= 0) a.assign(n, r.column_of_row[n]);
    return a;
}

}  // namespace

ChannelAssignment channel_assignment(const SystemConfig& cfg, const RoundEnvironment& env,
                                     const std::vector<double>& powers, const QueueState& queues, double V) {
    const int N = cfg.num_clusters();
    const int J = cfg.channels;
    CostMatrix cost(N, J);
    for (int n = 0; n < N; ++n) {
        const double p = powers.at(n) > 0.0 ? powers[n] : cfg.clusters[n].cu_power_max;
        for (int j = 0; j < J; ++j) cost(n, j) = pair_cost(cfg, env, n, j, p, queues, V);
    }
    return to_assignment(min_cost_assignment(cost), N, J);
}

double upsilon_value(const SystemConfig& cfg, const RoundEnvironment& env, const ChannelAssignment& assignment,
                     const std::vector<double>& powers, const QueueState& queues, double V) {
    double widest = 0.0;
    double penalty = 0.0;
    for (int n = 0; n < cfg.num_clusters(); ++n) {
        if (!assignment.transmitting(n)) continue;
        widest = std::max(widest, *uplink_delay(cfg, env, assignment, n, powers.at(n)));
        penalty += queues.Y.at(n) * powers.at(n);
    }
    return V * widest + penalty;
}

ResourceAllocation allocate_resources(const SystemConfig& cfg, const RoundEnvironment& env,
                                      const std::vector<int>& segments, const QueueState& queues, double V,
                                      bool enforce_gamma) {
    constexpr int kMaxIterations = 50;
    const int N = cfg.num_clusters();
    const int J = cfg.channels;

    // Pairs whose power sub-problem is infeasible are priced out of the matching.
    std::vector<std::vector<char>> forbidden(N, std::vector<char>(J, 0));
    std::vector<std::vector<std::string>> reason(N, std::vector<std::string>(J));

    std::vector<double> powers(N);
    for (int n = 0; n < N; ++n) powers[n] = cfg.clusters[n].cu_power_max;

    ResourceAllocation best;
    best.upsilon = kInf;
    double previous = kInf;

    for (int it = 0; it < kMaxIterations; ++it) {
        ++best.iterations;
        CostMatrix cost(N, J);
        double largest = 0.0;
        for (int n = 0; n < N; ++n) {
            const double p = powers[n] > 0.0 ? powers[n] : cfg.clusters[n].cu_power_max;
            for (int j = 0; j < J; ++j) {
                cost(n, j) = pair_cost(cfg, env, n, j, p, queues, V);
                largest = std::max(largest, cost(n, j));
            }
        }
        const double big = 1e6 * (largest + 1.0) * (N + 1);
        for (int n = 0; n < N; ++n)
            for (int j = 0; j < J; ++j)
                if (forbidden[n][j]) cost(n, j) = big;
        const auto matched = min_cost_assignment(cost);
        auto assignment = to_assignment(matched, N, J);

        bool retry = false;
        std::vector<double> next(N, 0.0);
        for (int n = 0; n < N && !retry; ++n) {
            const auto j = assignment.channel(n);
            if (!j) continue;
            if (forbidden[n][*j]) {
                throw InfeasibleError(reason[n][*j], "cluster " + std::to_string(n) +
                                                         " has no admissible CU power on any available channel");
            }
            try {
                const auto problem =
                    PowerProblem::from(cfg, env, n, *j, segments.at(n), queues.Y.at(n), V, enforce_gamma);
                next[n] = power_control(problem).power;
            } catch (const InfeasibleError& e) {
                forbidden[n][*j] = 1;
                reason[n][*j] = e.constraint();
                retry = true;
            }
        }
        if (retry) continue;

        powers = next;
        const double ups = upsilon_value(cfg, env, assignment, powers, queues, V);
        if (ups < best.upsilon) {
            best.upsilon = ups;
            best.assignment = assignment;
            best.powers = powers;
        }
        best.trajectory.push_back(best.upsilon);
        if (std::isfinite(previous) && std::fabs(previous - ups) <= 1e-9 * std::fabs(previous)) break;
        previous = ups;
    }
    if (!std::isfinite(best.upsilon)) throw InfeasibleError("C8", "resource allocation found no feasible point");
    return best;
}

}  // namespace edgepipe
