// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include "edgepipe/seg_solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "edgepipe/comm.hpp"
#include "edgepipe/convergence.hpp"
#include "edgepipe/errors.hpp"

namespace edgepipe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int count_scheduled(const std::vector<int>& delta) {
    return static_cast<int>(std::count_if(delta.begin(), delta.end(), [](int d) { return d > 0; }));
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

double chunk_flops(const SegmentProblem& p, int micro_batch) { return micro_batch * p.o_fwd + p.o_bwd; }

bool within(double value, double limit) { return value <= limit * (1.0 + kTieTolerance); }

bool gamma_ok(const SegmentProblem& p, int S) {
    if (!p.enforce_gamma) return true;
    return within(gamma_round(S, p.epsilon, p.convergence, p.N, p.L), p.convergence.gamma_max);
}

// Strict "a is better than b" with tolerance, then the tie-break chain.
bool better(double obj_a, int S_a, const std::vector<int>& delta_a, int m_a, double obj_b, int S_b,
            const std::vector<int>& delta_b, int m_b) {
    if (!std::isfinite(obj_b)) return std::isfinite(obj_a);
    if (!nearly_equal(obj_a, obj_b)) return obj_a < obj_b;
    if (S_a != S_b) return S_a < S_b;
    if (delta_a != delta_b) return delta_a < delta_b;
    return m_a < m_b;
}

}  // namespace

bool nearly_equal(double a, double b, double rel) noexcept {
    if (a == b) return true;
    if (!std::isfinite(a) || !std::isfinite(b)) return false;
    return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

SegmentProblem SegmentProblem::from(const SystemConfig& cfg, const RoundEnvironment& env, int n, double queue,
                                    double V, double epsilon, bool enforce_gamma) {
    const auto& cluster = cfg.clusters.at(n);
    const auto& real = env.clusters.at(n);
    SegmentProblem p;
    const std::size_t K = cluster.devices.size();
    p.speed.resize(K);
    p.hop.resize(K);
    p.hop_energy.resize(K);
    p.energy_per_flop.resize(K);
    p.energy_budget.resize(K);
    p.capacity.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const auto& dev = cluster.devices[k];
        const double f = real.devices[k].clock_hz;
        p.speed[k] = dev.flops_per_cycle * f;
        p.hop[k] = d2d_delay(cfg, env, n, static_cast<int>(k), dev.d2d_power);
        p.hop_energy[k] = dev.d2d_power * p.hop[k];
        p.energy_per_flop[k] = dev.capacitance * f * f / dev.flops_per_cycle;
        p.energy_budget[k] = dev.energy_budget;
        p.capacity[k] = dev.max_tebs();
    }
    p.L = cfg.model.L;
    p.batch_size = cfg.model.batch_size;
    p.o_fwd = cfg.model.o_fwd;
    p.o_bwd = cfg.model.o_bwd;
    p.V = V;
    p.queue = queue;
    p.enforce_gamma = enforce_gamma;
    p.convergence = cfg.convergence;
    p.N = cfg.num_clusters();
    p.epsilon = epsilon;
    return p;
}

double segment_objective(const SegmentProblem& p, const std::vector<int>& delta, int m) {
    const int S = count_scheduled(delta);
    const int micro = ceil_div(p.batch_size, m);
    const double flops = chunk_flops(p, micro);
    double widest = 0.0;
    double last_hop = 0.0;
    for (std::size_t k = 0; k < delta.size(); ++k) {
        if (delta[k] == 0) continue;
        const double hop = S > 1 ? p.hop[k] : 0.0;
        widest = std::max(widest, delta[k] * flops / p.speed[k] + hop);
        last_hop = hop;
    }
    const double tau = (S + m - 1) * widest - last_hop;
    return p.V * tau + p.queue * S;
}

std::string segment_violation(const SegmentProblem& p, const std::vector<int>& delta, int m) {
    const int K = p.devices();
    if (static_cast<int>(delta.size()) != K) return "C1";
    if (std::any_of(delta.begin(), delta.end(), [](int d) { return d < 0; })) return "C1";
    if (std::accumulate(delta.begin(), delta.end(), 0) != p.L) return "C1";
    if (m < 1 || m > p.batch_size) return "C1";
    const int S = count_scheduled(delta);
    if (S < 1 || S > K) return "C2";
    for (int k = 0; k < K; ++k)
        if (delta[k] > p.capacity[k]) return "C7";
    const double flops = chunk_flops(p, ceil_div(p.batch_size, m));
    for (int k = 0; k < K; ++k) {
        if (delta[k] == 0) continue;
        const double e = delta[k] * flops * p.energy_per_flop[k] + (S > 1 ? p.hop_energy[k] : 0.0);
        if (!within(e, p.energy_budget[k])) return "C9'";
    }
    if (!gamma_ok(p, S)) return "C11";
    return {};
}

double stationary_micro_batches(int S, double A, double B) {
    if (S <= 1 || A <= 0.0) return 1.0;
    if (B <= 0.0) return kInf;
    return std::sqrt((S - 1) * A / B);
}

std::vector<int> micro_batch_breakpoints(int b) {
    std::vector<int> out;
    int previous = std::numeric_limits<int>::max();
    for (int m = 1; m <= b; ++m) {
        const int micro = ceil_div(b, m);
        if (micro < previous) {
            out.push_back(m);
            previous = micro;
        }
    }
    return out;
}

MicroBatchChoice optimal_micro_batches(const SegmentProblem& p, const std::vector<int>& delta) {
    const int S = count_scheduled(delta);
    MicroBatchChoice best;
    best.objective = kInf;
    bool energy_blocked = false;

    // At fixed b_hat the objective grows with m and C9' is unchanged, so only
    // the smallest m for each b_hat can be optimal.
    for (int m : micro_batch_breakpoints(p.batch_size)) {
        const double flops = chunk_flops(p, ceil_div(p.batch_size, m));
        bool ok = true;
        for (std::size_t k = 0; k < delta.size() && ok; ++k) {
            if (delta[k] == 0) continue;
            const double e = delta[k] * flops * p.energy_per_flop[k] + (S > 1 ? p.hop_energy[k] : 0.0);
            ok = within(e, p.energy_budget[k]);
        }
        if (!ok) {
            energy_blocked = true;
            continue;
        }
        const double obj = segment_objective(p, delta, m);
        if (!std::isfinite(best.objective) || (obj < best.objective && !nearly_equal(obj, best.objective))) {
            best.m = m;
            best.objective = obj;
        }
    }
    if (!std::isfinite(best.objective))
        throw InfeasibleError(energy_blocked ? "C9'" : "C1", "no micro-batch count satisfies the device energy budgets");

    // Continuous stationary point of the bottleneck device at the chosen m.
    const int micro = ceil_div(p.batch_size, best.m);
    double widest = -1.0;
    for (std::size_t k = 0; k < delta.size(); ++k) {
        if (delta[k] == 0) continue;
        const double hop = S > 1 ? p.hop[k] : 0.0;
        const double w = delta[k] * chunk_flops(p, micro) / p.speed[k] + hop;
        if (w > widest) {
            widest = w;
            const double A = delta[k] * p.batch_size * p.o_fwd / p.speed[k];
            const double B = delta[k] * p.o_bwd / p.speed[k] + hop;
            best.stationary = stationary_micro_batches(S, A, B);
        }
    }
    return best;
}

namespace {

class PartitionSearch {
public:
    PartitionSearch(const SegmentProblem& p, int m) : p_(p), m_(m), K_(p.devices()) {
        micro_ = ceil_div(p.batch_size, m);
        flops_ = chunk_flops(p, micro_);
        suffix_capacity_.assign(K_ + 1, 0);
        for (int k = K_ - 1; k >= 0; --k) suffix_capacity_[k] = suffix_capacity_[k + 1] + std::max(0, p.capacity[k]);
        max_hop_ = 0.0;
        for (double h : p.hop) max_hop_ = std::max(max_hop_, h);
        delta_.assign(K_, 0);
    }

    PartitionChoice run() {
        best_.objective = kInf;
        if (m_ < 1 || m_ > p_.batch_size) throw InfeasibleError("C1", "micro-batch count out of range");
        dfs(0, p_.L, 0, 0.0);
        if (!std::isfinite(best_.objective)) throw InfeasibleError(diagnose(), "no TEB partition satisfies the constraints");
        best_.nodes = nodes_;
        return best_;
    }

private:
    void dfs(int k, int remaining, int scheduled, double widest_with_hop) {
        ++nodes_;
        if (remaining == 0) {
            leaf(scheduled);
            return;
        }
        if (k == K_ || suffix_capacity_[k] < remaining) return;

        const int S_lb = scheduled + 1;
        if (p_.enforce_gamma && !gamma_ok(p_, S_lb)) return;
        if (S_lb >= 2 && std::isfinite(best_.objective)) {
            const double tau_lb = std::max((S_lb + m_ - 2) * widest_with_hop, (S_lb + m_ - 1) * widest_with_hop - max_hop_);
            const double lb = p_.V * tau_lb + p_.queue * S_lb;
            if (lb > best_.objective && !nearly_equal(lb, best_.objective)) return;
        }

        const int upper = std::min(p_.capacity[k], remaining);
        for (int d = 0; d <= upper; ++d) {
            if (d > 0 && !within(d * flops_ * p_.energy_per_flop[k], p_.energy_budget[k])) break;
            delta_[k] = d;
            const double w = d > 0 ? d * flops_ / p_.speed[k] + p_.hop[k] : 0.0;
            dfs(k + 1, remaining - d, scheduled + (d > 0 ? 1 : 0), std::max(widest_with_hop, w));
        }
        delta_[k] = 0;
    }

    void leaf(int S) {
        if (!segment_violation(p_, delta_, m_).empty()) return;
        const double obj = segment_objective(p_, delta_, m_);
        if (better(obj, S, delta_, m_, best_.objective, best_.S, best_.delta, m_)) {
            best_.objective = obj;
            best_.S = S;
            best_.delta = delta_;
        }
    }

    std::string diagnose() const {
        if (suffix_capacity_[0] < p_.L) return "C7";
        if (p_.enforce_gamma) {
            std::vector<int> caps(p_.capacity.begin(), p_.capacity.end());
            std::sort(caps.rbegin(), caps.rend());
            int held = 0;
            int S_min = 0;
            for (int c : caps) {
                if (held >= p_.L) break;
                held += std::max(0, c);
                ++S_min;
            }
            if (!gamma_ok(p_, S_min)) return "C11";
        }
        return "C9'";
    }

    const SegmentProblem& p_;
    int m_;
    int K_;
    int micro_ = 1;
    double flops_ = 0.0;
    double max_hop_ = 0.0;
    std::vector<int> suffix_capacity_;
    std::vector<int> delta_;
    PartitionChoice best_;
    long nodes_ = 0;
};

}  // namespace

PartitionChoice optimal_partition(const SegmentProblem& problem, int m) { return PartitionSearch(problem, m).run(); }

SegmentSchedule schedule_segments(const SegmentProblem& p) {
    constexpr int kMaxSweeps = 50;
    constexpr double kStable = 1e-9;

    std::map<int, PartitionChoice> partition_cache;
    std::map<std::vector<int>, MicroBatchChoice> micro_cache;
    std::string first_error;
    std::string first_constraint;

    auto partition_at = [&](int m) -> const PartitionChoice& {
        auto it = partition_cache.find(m);
        if (it == partition_cache.end()) it = partition_cache.emplace(m, optimal_partition(p, m)).first;
        return it->second;
    };
    auto micro_for = [&](const std::vector<int>& delta) -> const MicroBatchChoice& {
        auto it = micro_cache.find(delta);
        if (it == micro_cache.end()) it = micro_cache.emplace(delta, optimal_micro_batches(p, delta)).first;
        return it->second;
    };

    SegmentSchedule best;
    best.objective = kInf;
    int total_sweeps = 0;

    auto consider = [&](const std::vector<int>& delta, int m, double obj, const std::vector<double>& trajectory) {
        const int S = count_scheduled(delta);
        if (better(obj, S, delta, m, best.objective, best.plan.S, best.plan.delta, best.plan.m)) {
            best.plan = SegmentPlan::make(delta, m, p.batch_size);
            best.objective = obj;
            best.trajectory = trajectory;
        }
    };

    // One AO run: partition at m, then m for that partition, until stable.
    auto run_from = [&](int m, std::vector<int> delta, bool partition_first) {
        std::vector<double> trajectory;
        double previous = kInf;
        if (!partition_first) {
            const auto& mc = micro_for(delta);
            m = mc.m;
            previous = mc.objective;
            trajectory.push_back(previous);
        }
        for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
            ++total_sweeps;
            const auto& part = partition_at(m);
            assert(!std::isfinite(previous) || part.objective <= previous * (1 + 1e-12) + 1e-300);
            delta = part.delta;
            const auto& mc = micro_for(delta);
            m = mc.m;
            const double obj = mc.objective;
            trajectory.push_back(obj);
            const bool stable = std::isfinite(previous) && std::fabs(previous - obj) <= kStable * std::fabs(previous);
            previous = obj;
            if (stable) break;
        }
        consider(delta, m, previous, trajectory);
    };

    auto guarded = [&](auto&& fn) {
        try {
            fn();
        } catch (const InfeasibleError& e) {
            if (first_error.empty()) {
                first_error = e.what();
                first_constraint = e.constraint();
            }
        }
    };

    // S0 = 1 start: the whole encoder on the first device that can hold it.
    for (int k = 0; k < p.devices(); ++k) {
        if (p.capacity[k] < p.L) continue;
        std::vector<int> delta(p.devices(), 0);
        delta[k] = p.L;
        guarded([&] {
            if (segment_violation(p, delta, 1) == "C9'" || segment_violation(p, delta, 1).empty())
                run_from(1, delta, /*partition_first=*/false);
        });
        break;
    }
    for (int m : micro_batch_breakpoints(p.batch_size)) guarded([&] { run_from(m, {}, /*partition_first=*/true); });

    if (!std::isfinite(best.objective))
        throw InfeasibleError(first_constraint.empty() ? "C1" : first_constraint,
                              first_error.empty() ? "no feasible segment plan" : first_error);
    best.iterations = total_sweeps;
    return best;
}

}  // namespace edgepipe
