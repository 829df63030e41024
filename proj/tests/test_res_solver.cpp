// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "edgepipe/errors.hpp"
#include "edgepipe/hungarian.hpp"
#include "edgepipe/res_solver.hpp"
#include "oracle.hpp"
#include "power_cases.hpp"
#include "support.hpp"

using namespace edgepipe;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::vector<double>> to_rows(const CostMatrix& c) {
    std::vector<std::vector<double>> rows(c.rows(), std::vector<double>(c.cols()));
    for (int r = 0; r < c.rows(); ++r)
        for (int k = 0; k < c.cols(); ++k) rows[r][k] = c(r, k);
    return rows;
}

}  // namespace

TEST_CASE("hungarian on small fixed matrices") {
    CostMatrix one(1, 1, 3.5);
    CHECK(min_cost_assignment(one).column_of_row == std::vector<int>{0});
    CHECK(min_cost_assignment(one).cost == 3.5);

    CostMatrix id(3, 3, 1.0);
    for (int i = 0; i < 3; ++i) id(i, i) = 0.0;
    const auto r = min_cost_assignment(id);
    CHECK(r.column_of_row == std::vector<int>{0, 1, 2});
    CHECK(r.cost == 0.0);
    CHECK(hungarian_square(id) == std::vector<int>{0, 1, 2});

    // Three CUs, two channels: exactly one CU is parked.
    CostMatrix tall(3, 2);
    tall(0, 0) = 1; tall(0, 1) = 2;
    tall(1, 0) = 5; tall(1, 1) = 9;
    tall(2, 0) = 4; tall(2, 1) = 1;
    const auto t = min_cost_assignment(tall);
    CHECK(std::count(t.column_of_row.begin(), t.column_of_row.end(), -1) == 1);
    CHECK(t.column_of_row == std::vector<int>{0, -1, 1});
    CHECK(t.cost == 2.0);

    // More channels than CUs: every CU is served.
    CostMatrix wide(2, 4);
    wide(0, 0) = 3; wide(0, 1) = 1; wide(0, 2) = 2; wide(0, 3) = 8;
    wide(1, 0) = 2; wide(1, 1) = 1; wide(1, 2) = 7; wide(1, 3) = 9;
    const auto w = min_cost_assignment(wide);
    CHECK(w.column_of_row == std::vector<int>{1, 0});
    CHECK(w.cost == 3.0);
}

TEST_CASE("ties resolve to the lexicographically smallest matching") {
    CostMatrix flat(3, 3, 1.0);
    CHECK(min_cost_assignment(flat).column_of_row == std::vector<int>{0, 1, 2});
    CostMatrix tall(3, 1, 2.0);
    CHECK(min_cost_assignment(tall).column_of_row == std::vector<int>{0, -1, -1});
}

TEST_CASE("hungarian matches brute force on random matrices") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 300; ++trial) {
        const int N = std::uniform_int_distribution<int>(1, 6)(rng);
        const int J = std::uniform_int_distribution<int>(1, 6)(rng);
        CostMatrix c(N, J);
        const bool integer = trial % 3 == 0;  // many ties
        for (int r = 0; r < N; ++r)
            for (int k = 0; k < J; ++k)
                c(r, k) = integer ? std::uniform_int_distribution<int>(0, 3)(rng)
                                  : std::uniform_real_distribution<double>(0, 10)(rng);
        const auto got = min_cost_assignment(c);
        const auto ref = oracle::brute_force_assignment(to_rows(c));
        CHECK(std::fabs(got.cost - ref.cost) <= 1e-12 * std::max(1.0, std::fabs(ref.cost)));
        CHECK(got.column_of_row == ref.column_of_row);
        const int served = static_cast<int>(N - std::count(got.column_of_row.begin(), got.column_of_row.end(), -1));
        CHECK(served == std::min(N, J));
    }
}

TEST_CASE("power objective pieces") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        const auto [P, u] = test::random_power_case(rng);
        for (double p : {0.01, 0.1, 0.3}) {
            CHECK(test::close_rel(P.objective(p), u.value(p), 1e-12));
            const double h = 1e-7;
            const double fd = (P.spectral_efficiency(p + h) - P.spectral_efficiency(p - h)) / (2 * h);
            CHECK(test::close_rel(P.spectral_slope(p), fd, 1e-6));
        }
        CHECK(P.energy(1e-12) == doctest::Approx(P.energy(0.0)).epsilon(1e-6));
    }
}

TEST_CASE("with an empty queue the CU transmits at full power") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        auto [P, u] = test::random_power_case(rng);
        P.queue = 0.0;
        P.energy_max = 1e9;
        P.epsilon_cap = kInf;
        CHECK(test::close_rel(power_control(P).power, P.power_max, 1e-9));
    }
}

TEST_CASE("a huge queue pushes power to the balance boundary") {
    std::mt19937_64 rng(57);
    for (int trial = 0; trial < 50; ++trial) {
        auto [P, u] = test::random_power_case(rng);
        P.queue = 1e9;
        P.energy_max = 1e9;
        const double pc = 0.3 * P.power_max;
        P.epsilon_cap = P.C / (pc * P.gain + P.interference);
        const auto s = power_control(P);
        CHECK(test::close_rel(s.power, pc, 1e-9));
        CHECK(P.epsilon(s.power) <= P.epsilon_cap * (1 + 1e-12));
    }
}

TEST_CASE("power control matches a dense grid and satisfies the true constraints") {
    std::mt19937_64 rng(59);
    int binding_energy = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const auto [P, u] = test::random_power_case(rng);
        const auto grid = oracle::grid_search_power([&](double p) { return u.value(p); },
                                                    [&](double p) { return u.admissible(p); }, u.P_max, 100000);
        PowerSolution s;
        try {
            s = power_control(P);
        } catch (const InfeasibleError&) {
            CHECK_FALSE(grid.has_value());
            continue;
        }
        REQUIRE(grid.has_value());
        CHECK(s.objective <= grid->value * (1 + 1e-3));
        CHECK(s.power <= u.P_max);
        CHECK(P.energy(s.power) <= u.E_max * (1 + 1e-6));
        if (std::isfinite(u.eps_cap)) CHECK(u.C / (s.power * u.h + u.I) <= u.eps_cap * (1 + 1e-6));
        binding_energy += P.energy(s.power) > u.E_max * (1 - 1e-6);
    }
    CHECK(binding_energy > 0);
}

TEST_CASE("infeasible power problems are named") {
    std::mt19937_64 rng(61);
    auto [P, u] = test::random_power_case(rng);
    auto c11 = P;
    c11.epsilon_cap = c11.epsilon(c11.power_max) * 0.5;
    try {
        power_control(c11);
        FAIL("expected C11");
    } catch (const InfeasibleError& e) {
        CHECK(e.constraint() == "C11");
    }
    auto c8 = P;
    c8.epsilon_cap = kInf;
    c8.energy_max = c8.energy(0.0) * 0.5;
    try {
        power_control(c8);
        FAIL("expected C8");
    } catch (const InfeasibleError& e) {
        CHECK(e.constraint() == "C8");
    }
}

TEST_CASE("binding energy budget lands on the C8 boundary") {
    std::mt19937_64 rng(63);
    auto [P, u] = test::random_power_case(rng);
    P.queue = 0.0;
    P.epsilon_cap = kInf;
    P.energy_max = 0.5 * (P.energy(0.0) + P.energy(P.power_max));
    const auto s = power_control(P);
    CHECK(s.power < P.power_max);
    CHECK(test::close_rel(P.energy(s.power), P.energy_max, 1e-6));
}

TEST_CASE("resource allocation on random systems") {
    std::mt19937_64 rng(65);
    for (int trial = 0; trial < 40; ++trial) {
        const int N = std::uniform_int_distribution<int>(1, 5)(rng);
        const int J = std::uniform_int_distribution<int>(1, 5)(rng);
        auto cfg = test::random_system(rng, N, 3, 6, 16, J);
        const auto env = sample_round_environment(cfg, 1);
        QueueState q = QueueState::zeros(N);
        for (double& y : q.Y) y = std::uniform_real_distribution<double>(0, 20)(rng);
        const std::vector<int> segments(N, 1);
        const double V = 10.0;
        const auto a = allocate_resources(cfg, env, segments, q, V);

        CHECK(a.assignment.structurally_valid());
        int served = 0;
        for (int n = 0; n < N; ++n) {
            if (!a.assignment.transmitting(n)) {
                CHECK(a.powers[n] == 0.0);
                continue;
            }
            ++served;
            const auto P = PowerProblem::from(cfg, env, n, *a.assignment.channel(n), 1, q.Y[n], V);
            CHECK(a.powers[n] > 0.0);
            CHECK(P.feasible(a.powers[n], 1e-6));
        }
        CHECK(served == std::min(N, J));
        CHECK(test::close_rel(a.upsilon, upsilon_value(cfg, env, a.assignment, a.powers, q, V), 1e-12));
        for (std::size_t i = 1; i < a.trajectory.size(); ++i) CHECK(a.trajectory[i] <= a.trajectory[i - 1]);

        // At the returned powers, the matching is optimal for the pair costs.
        const auto again = channel_assignment(cfg, env, a.powers, q, V);
        CostMatrix cost(N, J);
        for (int n = 0; n < N; ++n) {
            const double p = a.powers[n] > 0 ? a.powers[n] : cfg.clusters[n].cu_power_max;
            for (int j = 0; j < J; ++j) {
                const double r = uplink_rate(uplink_link(cfg, env, n, j, p));
                cost(n, j) = V * (cfg.model.act_size_enc + cfg.model.enc_param_size) / r + q.Y[n] * p;
            }
        }
        const auto ref = oracle::brute_force_assignment(to_rows(cost));
        double again_cost = 0.0;
        for (int n = 0; n < N; ++n)
            if (again.transmitting(n)) again_cost += cost(n, *again.channel(n));
        CHECK(test::close_rel(again_cost, ref.cost, 1e-12));
    }
}

TEST_CASE("a single CU picks its best channel") {
    auto cfg = test::homogeneous_system(1, 4, 8);
    cfg.channels = 3;
    cfg.clusters[0].uplink_gain_db = {-10.0, 0.0};
    const auto env = sample_round_environment(cfg, 2);
    const auto a = allocate_resources(cfg, env, {1}, QueueState::zeros(1), 10.0);
    const auto& g = env.clusters[0].uplink_gain;
    CHECK(*a.assignment.channel(0) == std::max_element(g.begin(), g.end()) - g.begin());
    CHECK(a.powers[0] == doctest::Approx(cfg.clusters[0].cu_power_max).epsilon(1e-9));
}
