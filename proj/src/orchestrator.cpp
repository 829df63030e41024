// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include "edgepipe/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "edgepipe/convergence.hpp"
#include "edgepipe/errors.hpp"
#include "edgepipe/res_solver.hpp"
#include "edgepipe/seg_solver.hpp"

namespace edgepipe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Engine for a (seed, round, stream) triple, independent of the environment stream.
std::mt19937_64 baseline_rng(const SystemConfig& cfg, int round, std::uint64_t stream) {
    return std::mt19937_64(mix(mix(cfg.rng_seed ^ 0x5bd1e995ULL) ^ mix(static_cast<std::uint64_t>(round)) ^
                               mix(stream + 0x1234567ULL)));
}

std::vector<int> eligible_devices(const ClusterProfile& cluster) {
    std::vector<int> out;
    for (int k = 0; k < static_cast<int>(cluster.devices.size()); ++k)
        if (cluster.devices[k].max_tebs() >= 1) out.push_back(k);
    return out;
}

// Balanced TEB split over every memory-eligible device, in index order.
std::vector<int> uniform_delta(const ClusterProfile& cluster, int L) {
    const auto eligible = eligible_devices(cluster);
    const int S = std::min<int>(static_cast<int>(eligible.size()), L);
    if (S == 0) throw InfeasibleError("C7", "no device can hold a single TEB");
    std::vector<int> delta(cluster.devices.size(), 0);
    for (int i = 0; i < S; ++i) delta[eligible[i]] = L / S + (i < L % S ? 1 : 0);
    for (std::size_t k = 0; k < delta.size(); ++k)
        if (delta[k] > cluster.devices[k].max_tebs())
            throw InfeasibleError("C7", "balanced split exceeds a device memory budget");
    return delta;
}

std::vector<double> cluster_epsilons(const SystemConfig& cfg, const RoundEnvironment& env,
                                     const ChannelAssignment& assignment, const std::vector<double>& powers) {
    const int N = cfg.num_clusters();
    std::vector<double> eps(N, 0.0);
    for (int n = 0; n < N; ++n) {
        const auto& real = env.clusters[n];
        if (auto j = assignment.channel(n)) {
            eps[n] = interference_error(powers[n], real.uplink_gain[*j], real.uplink_interference, cfg.convergence.C);
        } else {
            // Not transmitting yet: the best case it could face if matched.
            const double h = *std::max_element(real.uplink_gain.begin(), real.uplink_gain.end());
            eps[n] = interference_error(cfg.clusters[n].cu_power_max, h, real.uplink_interference, cfg.convergence.C);
        }
    }
    return eps;
}

// Largest power <= P_max meeting the CU energy budget on channel j.
double max_admissible_power(const SystemConfig& cfg, const RoundEnvironment& env, int n, int j) {
    auto P = PowerProblem::from(cfg, env, n, j, 1, 0.0, 1.0, /*enforce_gamma=*/false);
    if (P.energy(0.0) > P.energy_max) throw InfeasibleError("C8", "cluster " + std::to_string(n) + " cannot upload");
    double hi = P.power_max;
    if (P.energy(hi) <= P.energy_max) return hi;
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (P.energy(mid) <= P.energy_max ? lo : hi) = mid;
    }
    return lo;
}

// Picks m for a fixed split: the GPipe default m = S when it passes C9',
// otherwise the nearest admissible count.
int baseline_micro_batches(const SegmentProblem& problem, const std::vector<int>& delta, int S) {
    const int b = problem.batch_size;
    const int preferred = std::clamp(S, 1, b);
    for (int offset = 0; offset < b; ++offset) {
        for (int m : {preferred + offset, preferred - offset}) {
            if (m < 1 || m > b) continue;
            if (segment_violation(problem, delta, m).empty()) return m;
        }
    }
    throw InfeasibleError("C9'", "no micro-batch count satisfies the device energy budgets");
}

SegmentPlan balanced_plan(const SystemConfig& cfg, const RoundEnvironment& env, int n) {
    const auto delta = uniform_delta(cfg.clusters[n], cfg.model.L);
    const auto problem = SegmentProblem::from(cfg, env, n, 0.0, 1.0, 0.0, /*enforce_gamma=*/false);
    const int S = static_cast<int>(std::count_if(delta.begin(), delta.end(), [](int d) { return d > 0; }));
    return SegmentPlan::make(delta, baseline_micro_batches(problem, delta, S), cfg.model.batch_size);
}

SegmentPlan random_plan(const SystemConfig& cfg, const RoundEnvironment& env, int n, std::mt19937_64& rng) {
    const auto& cluster = cfg.clusters[n];
    const int L = cfg.model.L;
    const int b = cfg.model.batch_size;
    const auto problem = SegmentProblem::from(cfg, env, n, 0.0, 1.0, 0.0, /*enforce_gamma=*/false);
    auto eligible = eligible_devices(cluster);
    const int S_max = std::min<int>(static_cast<int>(eligible.size()), L);
    if (S_max == 0) throw InfeasibleError("C7", "no device can hold a single TEB");

    for (int attempt = 0; attempt < 1000; ++attempt) {
        const int S = std::uniform_int_distribution<int>(1, S_max)(rng);
        std::shuffle(eligible.begin(), eligible.end(), rng);
        std::vector<int> chosen(eligible.begin(), eligible.begin() + S);
        std::sort(chosen.begin(), chosen.end());

        // Random composition of L into S positive parts via S-1 distinct cut points.
        std::vector<int> cuts(L - 1);
        std::iota(cuts.begin(), cuts.end(), 1);
        std::shuffle(cuts.begin(), cuts.end(), rng);
        cuts.resize(S - 1);
        std::sort(cuts.begin(), cuts.end());
        std::vector<int> delta(cluster.devices.size(), 0);
        int prev = 0;
        for (int i = 0; i < S; ++i) {
            const int cut = i + 1 < S ? cuts[i] : L;
            delta[chosen[i]] = cut - prev;
            prev = cut;
        }
        const int m = std::uniform_int_distribution<int>(1, b)(rng);
        if (segment_violation(problem, delta, m).empty()) return SegmentPlan::make(delta, m, b);
    }
    return balanced_plan(cfg, env, n);
}

// Channels to clusters in priority order, each taking its best remaining channel.
void greedy_channels(const SystemConfig& cfg, const RoundEnvironment& env, const std::vector<int>& order,
                     SchedulingDecision& decision) {
    const int J = cfg.channels;
    std::vector<char> taken(J, 0);
    const int slots = std::min<int>(cfg.num_clusters(), J);
    for (int i = 0; i < slots; ++i) {
        const int n = order[i];
        int best = -1;
        for (int j = 0; j < J; ++j)
            if (!taken[j] && (best < 0 || env.clusters[n].uplink_gain[j] > env.clusters[n].uplink_gain[best])) best = j;
        taken[best] = 1;
        decision.assignment.assign(n, best);
    }
}

void fill_powers(const SystemConfig& cfg, const RoundEnvironment& env, SchedulingDecision& decision) {
    for (int n = 0; n < cfg.num_clusters(); ++n) {
        const auto j = decision.assignment.channel(n);
        decision.powers[n] = j ? max_admissible_power(cfg, env, n, *j) : 0.0;
    }
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

}  // namespace

std::string_view policy_name(Policy p) noexcept {
    switch (p) {
        case Policy::dssra: return "dssra";
        case Policy::random: return "random";
        case Policy::loss_only: return "loss-only";
        case Policy::delay_only: return "delay-only";
        case Policy::uniform_split: return "uniform-split";
    }
    return "unknown";
}

Policy parse_policy(std::string_view name) {
    std::string s(name);
    std::replace(s.begin(), s.end(), '_', '-');
    for (Policy p : {Policy::dssra, Policy::random, Policy::loss_only, Policy::delay_only, Policy::uniform_split})
        if (policy_name(p) == s) return p;
    throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

SchedulingDecision dssra_round(const SystemConfig& cfg, const RoundEnvironment& env, const QueueState& queues,
                               double V, const DssraOptions& options) {
    const int N = cfg.num_clusters();
    const double gamma_max = cfg.convergence.gamma_max;

    // Initial X: every CU at P_max, matched under the round-start queues.
    std::vector<double> powers(N);
    for (int n = 0; n < N; ++n) powers[n] = cfg.clusters[n].cu_power_max;
    ChannelAssignment assignment = channel_assignment(cfg, env, powers, queues, V);
    for (int n = 0; n < N; ++n)
        if (!assignment.transmitting(n)) powers[n] = 0.0;

    std::vector<std::vector<int>> fixed_delta;
    if (options.uniform_split)
        for (int n = 0; n < N; ++n) fixed_delta.push_back(uniform_delta(cfg.clusters[n], cfg.model.L));

    SchedulingDecision best;
    double best_value = kInf;
    QueueState work = queues;

    for (int it = 0; it < options.max_inner_iterations; ++it) {
        const auto eps = cluster_epsilons(cfg, env, assignment, powers);

        std::vector<SegmentProblem> problems;
        problems.reserve(N);
        for (int n = 0; n < N; ++n)
            problems.push_back(SegmentProblem::from(cfg, env, n, work.Y[n], V, eps[n], options.enforce_gamma));

        std::vector<SegmentPlan> plans(N);
        if (options.uniform_split) {
            for (int n = 0; n < N; ++n) {
                const auto& delta = fixed_delta[n];
                const auto mc = optimal_micro_batches(problems[n], delta);
                plans[n] = SegmentPlan::make(delta, mc.m, cfg.model.batch_size);
                if (auto v = segment_violation(problems[n], delta, mc.m); !v.empty())
                    throw InfeasibleError(v, "uniform split violates a constraint in cluster " + std::to_string(n));
            }
        } else {
            const auto schedules = schedule_all_clusters(problems, options.exec);
            for (int n = 0; n < N; ++n) plans[n] = schedules[n].plan;
        }

        std::vector<int> segments(N);
        for (int n = 0; n < N; ++n) segments[n] = plans[n].S;
        const auto alloc = allocate_resources(cfg, env, segments, work, V, options.enforce_gamma);

        SchedulingDecision x{env.round, plans, alloc.assignment, alloc.powers};
        const double value = drift_penalty(x, cfg, env, queues, V);
        if (value < best_value) {
            best_value = value;
            best = x;
        }
        assignment = alloc.assignment;
        powers = alloc.powers;

        const double gamma = system_gamma(x, cfg, env);
        QueueState next = queues;
        for (double& y : next.Y) y = queue_update(y, gamma, gamma_max);
        const bool stable = sup_distance(next.Y, work.Y) < options.queue_tolerance;
        work = next;
        if (stable) break;
    }
    return best;
}

double loss_proxy(const SystemConfig& cfg, int round, int n) {
    const auto& bp = cfg.baselines;
    auto rng = baseline_rng(cfg, round, 1000 + static_cast<std::uint64_t>(n));
    const double u = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    return bp.loss_amplitude * std::exp(-round / bp.loss_decay_rounds) * (1.0 + bp.loss_noise * u);
}

SchedulingDecision baseline_decision(Policy policy, const SystemConfig& cfg, const RoundEnvironment& env,
                                     const QueueState& queues, const BaselineHistory& history) {
    const int N = cfg.num_clusters();
    const int J = cfg.channels;

    if (policy == Policy::dssra || policy == Policy::uniform_split) {
        DssraOptions opts;
        opts.uniform_split = policy == Policy::uniform_split;
        opts.enforce_gamma = !opts.uniform_split;
        return dssra_round(cfg, env, queues, cfg.convergence.V, opts);
    }

    SchedulingDecision d;
    d.round = env.round;
    d.assignment = ChannelAssignment(N, J);
    d.powers.assign(N, 0.0);
    d.plans.resize(N);

    const bool random_round = policy == Policy::random || (policy == Policy::delay_only && history.previous_delay.empty());
    if (random_round) {
        auto rng = baseline_rng(cfg, env.round, 0);
        std::vector<int> clusters(N), channels(J);
        std::iota(clusters.begin(), clusters.end(), 0);
        std::iota(channels.begin(), channels.end(), 0);
        std::shuffle(clusters.begin(), clusters.end(), rng);
        std::shuffle(channels.begin(), channels.end(), rng);
        for (int i = 0; i < std::min(N, J); ++i) d.assignment.assign(clusters[i], channels[i]);
        for (int n = 0; n < N; ++n) d.plans[n] = random_plan(cfg, env, n, rng);
        fill_powers(cfg, env, d);
        return d;
    }

    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    if (policy == Policy::loss_only) {
        std::vector<double> loss(N);
        for (int n = 0; n < N; ++n) loss[n] = loss_proxy(cfg, env.round, n);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return loss[a] > loss[b]; });
    } else {
        const auto& prev = history.previous_delay;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return prev.at(a) < prev.at(b); });
    }
    greedy_channels(cfg, env, order, d);
    for (int n = 0; n < N; ++n) d.plans[n] = balanced_plan(cfg, env, n);
    fill_powers(cfg, env, d);
    return d;
}

RoundMetrics evaluate_round(const SchedulingDecision& decision, const SystemConfig& cfg, const RoundEnvironment& env,
                            const QueueState& queues, double V) {
    const auto cms = evaluate_clusters(decision, cfg, env);
    RoundMetrics m;
    m.round = env.round;
    for (const auto& cm : cms) {
        m.tau_pipe.push_back(cm.tau_pipe);
        m.tau_up.push_back(cm.tau_up);
        m.energy_pipe.push_back(cm.energy_pipe);
        m.energy_com.push_back(cm.energy_com);
        m.energy_sch.push_back(cm.energy_sch);
        m.gamma = std::max(m.gamma, cm.gamma);
    }
    m.tau = round_delay(cms);
    m.drift_penalty = drift_penalty(decision, cfg, env, queues, V);
    m.queues = advance_queues(queues, m.gamma, cfg.convergence.gamma_max).Y;
    return m;
}

TraceLog run_simulation(const SystemConfig& cfg, int T, Policy policy, const SimulationOptions& options) {
    if (T < 0) throw std::invalid_argument("run_simulation: negative round count");
    const int N = cfg.num_clusters();
    const double V = cfg.convergence.V;

    TraceLog log;
    log.policy = std::string(policy_name(policy));
    log.seed = cfg.rng_seed;
    log.V = V;

    QueueState queues = QueueState::zeros(N);
    BaselineHistory history;
    RunningGapBound bound(cfg.convergence.initial_gap, cfg.convergence, N, cfg.model.L);
    int streak = 0;

    for (int t = 1; t <= T; ++t) {
        const auto env = sample_round_environment(cfg, t);
        queues.round = t;

        SchedulingDecision decision;
        bool relaxed = false;
        if (policy == Policy::dssra || policy == Policy::uniform_split) {
            DssraOptions opts;
            opts.exec = options.exec;
            opts.uniform_split = policy == Policy::uniform_split;
            // A fixed split cannot react to the balance bound; the queue absorbs it.
            opts.enforce_gamma = !opts.uniform_split;
            try {
                decision = dssra_round(cfg, env, queues, V, opts);
                streak = 0;
            } catch (const InfeasibleError& e) {
                if (++streak > options.max_infeasible_streak)
                    throw InfeasibleError(e.constraint(), "round " + std::to_string(t) + ": " +
                                                              std::to_string(streak) +
                                                              " consecutive infeasible rounds; last: " + e.what());
                opts.enforce_gamma = false;
                decision = dssra_round(cfg, env, queues, V, opts);
                relaxed = true;
            }
        } else {
            decision = baseline_decision(policy, cfg, env, queues, history);
        }

        if (auto v = decision_violation(decision, cfg, env); !v.empty())
            throw std::logic_error("round " + std::to_string(t) + ": emitted decision violates " + v);

        RoundMetrics metrics = evaluate_round(decision, cfg, env, queues, V);
        metrics.relaxed = relaxed;

        int S_sys = 0;
        double eps_sys = 0.0;
        const auto cms = evaluate_clusters(decision, cfg, env);
        for (int n = 0; n < N; ++n) {
            S_sys = std::max(S_sys, decision.plans[n].S);
            eps_sys = std::max(eps_sys, cms[n].epsilon);
        }
        metrics.bound = bound.push(S_sys, eps_sys);

        history.previous_delay.assign(N, 0.0);
        for (int n = 0; n < N; ++n) history.previous_delay[n] = metrics.tau_pipe[n] + metrics.tau_up[n].value_or(0.0);

        queues = QueueState{t + 1, metrics.queues};
        log.rounds.push_back(RoundRecord{std::move(decision), std::move(metrics)});
    }
    log.summary = summarize(log.rounds, cfg.convergence.gamma_max);
    return log;
}

TraceSummary summarize(const std::vector<RoundRecord>& rounds, double gamma_max) {
    TraceSummary s;
    s.rounds = static_cast<int>(rounds.size());
    s.gamma_max = gamma_max;
    if (rounds.empty()) return s;
    double backlog = 0.0;
    for (const auto& r : rounds) {
        s.cum_tau += r.metrics.tau;
        s.avg_gamma += r.metrics.gamma;
        const auto& Y = r.metrics.queues;
        if (!Y.empty()) backlog += std::accumulate(Y.begin(), Y.end(), 0.0) / static_cast<double>(Y.size());
    }
    s.avg_tau = s.cum_tau / s.rounds;
    s.avg_gamma /= s.rounds;
    s.avg_backlog = backlog / s.rounds;
    const auto& last = rounds.back().metrics.queues;
    if (!last.empty()) s.max_final_queue = *std::max_element(last.begin(), last.end());
    return s;
}

}  // namespace edgepipe
