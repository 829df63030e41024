// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "oracle.hpp"
#include "support.hpp"

using namespace edgepipe;

TEST_CASE("segment brute force refuses oversized instances") {
    auto cfg = test::homogeneous_system(7, 12, 64);
    const auto env = sample_round_environment(cfg, 1);
    CHECK_THROWS_AS(oracle::brute_force_segment_plan(cfg, env, 0, {}), std::domain_error);
    auto big_b = test::homogeneous_system(2, 4, 65);
    CHECK_THROWS_AS(oracle::brute_force_segment_plan(big_b, sample_round_environment(big_b, 1), 0, {}),
                    std::domain_error);
}

TEST_CASE("segment brute force on one device") {
    auto cfg = test::homogeneous_system(1, 5, 10, 10.0, 1e8);
    const auto env = sample_round_environment(cfg, 1);
    const auto opt = oracle::brute_force_segment_plan(cfg, env, 0, {0.0, 1.0, 0.0, false});
    REQUIRE(opt);
    CHECK(opt->delta == std::vector<int>{5});
    CHECK(opt->m == 1);
    CHECK(opt->objective == doctest::Approx(5 * (10 * 2e6 + 2e6) / 1e9).epsilon(1e-12));
}

TEST_CASE("segment brute force reports infeasibility") {
    auto cfg = test::homogeneous_system(2, 6, 8);
    for (auto& d : cfg.clusters[0].devices) d.mem_budget = 2.5e8 * 2;
    const auto env = sample_round_environment(cfg, 1);
    CHECK_FALSE(oracle::brute_force_segment_plan(cfg, env, 0, {}).has_value());
}

TEST_CASE("assignment brute force") {
    CHECK_THROWS_AS(oracle::brute_force_assignment(std::vector<std::vector<double>>(7, std::vector<double>(2, 0.0))),
                    std::domain_error);
    const auto one = oracle::brute_force_assignment({{4.0}});
    CHECK(one.column_of_row == std::vector<int>{0});
    CHECK(one.cost == 4.0);
    const auto tall = oracle::brute_force_assignment({{1.0}, {0.5}});
    CHECK(tall.column_of_row == std::vector<int>{-1, 0});
    CHECK(tall.cost == 0.5);
    const auto tie = oracle::brute_force_assignment({{1.0, 1.0}, {1.0, 1.0}});
    CHECK(tie.column_of_row == std::vector<int>{0, 1});
}

TEST_CASE("grid search finds the minimum of simple functions") {
    const auto lin = oracle::grid_search_power([](double p) { return p; }, [](double) { return true; }, 2.0, 100);
    REQUIRE(lin);
    CHECK(lin->p == doctest::Approx(0.02));
    const auto quad = oracle::grid_search_power([](double p) { return (p - 0.3) * (p - 0.3); },
                                                [](double p) { return p < 0.9; }, 1.0, 1000);
    REQUIRE(quad);
    CHECK(quad->p == doctest::Approx(0.3));
    const auto none = oracle::grid_search_power([](double p) { return p; }, [](double) { return false; }, 1.0, 10);
    CHECK_FALSE(none.has_value());

    const auto flat = oracle::grid_search_power_parallel([](double) { return 1.0; }, [](double) { return true; }, 1.0, 1000);
    REQUIRE(flat);
    CHECK(flat->p == doctest::Approx(1e-3));
    for (int k = 0; k < 5; ++k) {
        auto f = [k](double p) { return std::cos(7 * p + k); };
        const auto a = oracle::grid_search_power(f, [](double) { return true; }, 1.0, 10007);
        const auto b = oracle::grid_search_power_parallel(f, [](double) { return true; }, 1.0, 10007);
        CHECK(a->p == b->p);
        CHECK(a->value == b->value);
    }
}

TEST_CASE("uplink instance") {
    oracle::UplinkInstance u;
    u.V = 2.0;
    u.payload = 1e6;
    u.theta = 8e5;
    u.B = 1e6;
    u.h = 1.0;
    u.I = 1.0;
    u.N0 = 0.0;
    u.Y = 0.5;
    u.P_max = 3.0;
    u.E_max = 10.0;
    u.C = 1.0;
    u.eps_cap = std::numeric_limits<double>::infinity();
    // rate at p = 1 is 1e6 bit/s
    CHECK(u.value(1.0) == doctest::Approx(2.0 + 0.5));
    CHECK(u.admissible(1.0));
    CHECK_FALSE(u.admissible(3.5));
    CHECK_FALSE(u.admissible(0.0));
    u.eps_cap = 0.4;  // needs p >= 1.5
    CHECK_FALSE(u.admissible(1.0));
    CHECK(u.admissible(2.0));
}

TEST_CASE("event simulation of simple pipelines") {
    CHECK(oracle::simulate_pipeline({1.0}, {0.0}, 4) == doctest::Approx(4.0));
    CHECK(oracle::simulate_pipeline({1.0, 1.0}, {0.5, 0.5}, 3) == doctest::Approx(4 * 1.5 - 0.5));
    CHECK(oracle::simulate_pipeline({2.0, 1.0}, {0.0, 0.0}, 2) == doctest::Approx(5.0));
}
