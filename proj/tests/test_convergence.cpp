// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "edgepipe/convergence.hpp"
#include "support.hpp"

using namespace edgepipe;

namespace {

ConvergenceParams params() {
    ConvergenceParams p;
    p.beta = 1.0;
    p.eta = 0.01;
    p.xi = 0.5;
    p.phi_bound = 1.0;
    p.C = 0.05;
    p.gamma_max = 1e-4;
    return p;
}

}  // namespace

TEST_CASE("interference error") {
    CHECK(interference_error(0.5, 0.98, 0.07, 0.0) == 0.0);
    CHECK(interference_error(0.5, 0.98, 0.07, 1.0) == doctest::Approx(1.0 / 0.56).epsilon(1e-14));
    double prev = interference_error(0.0, 0.98, 0.07, 1.0);
    for (double p = 0.1; p < 100; p *= 2) {
        const double e = interference_error(p, 0.98, 0.07, 1.0);
        CHECK(e < prev);
        prev = e;
    }
    CHECK(interference_error(1e12, 0.98, 0.07, 1.0) < 1e-11);
}

TEST_CASE("contraction factor and its positivity threshold") {
    auto p = params();
    p.eta = 0.0;
    CHECK(contraction_factor(p, 3, 3, 12) == 0.0);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.1, 2.0);
    for (int i = 0; i < 200; ++i) {
        ConvergenceParams q = params();
        q.beta = U(rng);
        q.xi = U(rng);
        const int S = std::uniform_int_distribution<int>(1, 8)(rng);
        const int N = std::uniform_int_distribution<int>(1, 5)(rng);
        const int L = std::uniform_int_distribution<int>(1, 24)(rng);
        const double thr = positive_contraction_threshold(q, S, N, L);
        CHECK(test::close_rel(thr, 2 * q.xi / (q.beta * (1 + double(S) * S / (N * L))), 1e-14));
        q.eta = thr * 0.999;
        CHECK(contraction_factor(q, S, N, L) > 0.0);
        q.eta = thr * 1.001;
        CHECK(contraction_factor(q, S, N, L) < 0.0);
    }
    CHECK(contraction_factor(params(), 4, 3, 12) < contraction_factor(params(), 2, 3, 12));
}

TEST_CASE("balance bound") {
    auto p = params();
    const int N = 3, L = 12;
    const double coef = p.beta * p.eta * p.eta / (2.0 * N);
    CHECK(gamma_round(1, 0.0, p, N, L) == doctest::Approx(coef * (1.0 / L + 1.0)).epsilon(1e-14));
    for (int S = 1; S < 10; ++S) CHECK(gamma_round(S + 1, 0.1, p, N, L) > gamma_round(S, 0.1, p, N, L));
    const double e_low = interference_error(0.1, 0.98, 0.07, p.C);
    const double e_high = interference_error(0.4, 0.98, 0.07, p.C);
    CHECK(gamma_round(3, e_high, p, N, L) < gamma_round(3, e_low, p, N, L));

    // The cap inverts the bound.
    for (int S = 1; S <= 6; ++S) {
        const double cap = epsilon_cap(S, p, N, L);
        CHECK(test::close_rel(gamma_round(S, cap, p, N, L), p.gamma_max, 1e-12));
    }
}

TEST_CASE("learning-rate threshold") {
    const auto p = params();
    CHECK(max_learning_rate(p, 1, 1, 12) == doctest::Approx(4 * p.xi * 12 / (p.beta * 13)).epsilon(1e-14));
    for (int S = 1; S < 8; ++S) CHECK(max_learning_rate(p, S + 1, 3, 12) < max_learning_rate(p, S, 3, 12));
    CHECK(max_learning_rate(p, 3, 3, 12) == doctest::Approx(4 * 0.5 * 36 / 21.0).epsilon(1e-14));
}

TEST_CASE("gap bound for a single round") {
    const auto p = params();
    const int N = 3, L = 12;
    const RoundHistory h{2, 0.5, 0.98, 0.07};
    const auto b = optimality_gap_bound(std::vector<RoundHistory>{h}, 2.0, p, N, L);
    REQUIRE(b);
    const double sigma = contraction_factor(p, 2, N, L);
    CHECK(b->initial == doctest::Approx(2.0 * (1 - 2 * sigma)).epsilon(1e-14));
    CHECK(b->task == doctest::Approx(p.beta * p.eta * p.eta * p.phi_bound * p.phi_bound / N * (4.0 / L + 1)).epsilon(1e-14));
    CHECK(b->interference == doctest::Approx(p.eta / N * interference_error(0.5, 0.98, 0.07, p.C)).epsilon(1e-14));
    CHECK_THROWS(optimality_gap_bound(std::vector<RoundHistory>{}, 1.0, p, N, L));
}

TEST_CASE("constant schedule matches the geometric series") {
    const auto p = params();
    const int N = 3, L = 12, T = 10;
    const RoundHistory h{3, 0.4, 0.97, 0.065};
    const std::vector<RoundHistory> hist(T, h);
    const auto b = optimality_gap_bound(hist, 1.5, p, N, L);
    REQUIRE(b);
    const double s = contraction_factor(p, 3, N, L);
    const double geom = (1 - std::pow(1 - s, T)) / s;
    const double task = p.beta * p.eta * p.eta / N * (9.0 / L + 1);
    const double itf = p.eta / N * interference_error(0.4, 0.97, 0.065, p.C);
    CHECK(test::close_rel(b->initial, std::pow(1 - 2 * s, T) * 1.5, 1e-12));
    CHECK(test::close_rel(b->task, task * geom, 1e-12));
    CHECK(test::close_rel(b->interference, itf * geom, 1e-12));
}

TEST_CASE("zero interference error with a single segment contracts geometrically") {
    auto p = params();
    p.C = 0.0;
    const int N = 2, L = 6, T = 25;
    const auto b = optimality_gap_bound(std::vector<RoundHistory>(T, RoundHistory{1, 0.3, 1.0, 0.07}), 1.0, p, N, L);
    REQUIRE(b);
    const double s = contraction_factor(p, 1, N, L);
    CHECK(b->interference == 0.0);
    CHECK(test::close_rel(b->total(), std::pow(1 - 2 * s, T) + p.beta * p.eta * p.eta / N * (1.0 / L + 1) *
                                                                   (1 - std::pow(1 - s, T)) / s,
                          1e-12));
}

TEST_CASE("higher power never loosens the bound") {
    const auto p = params();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(0.05, 0.5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<RoundHistory> hist;
        for (int t = 0; t < 20; ++t)
            hist.push_back({std::uniform_int_distribution<int>(1, 5)(rng), U(rng), 0.98, 0.07});
        const auto base = optimality_gap_bound(hist, 1.0, p, 3, 12);
        const int t0 = std::uniform_int_distribution<int>(0, 19)(rng);
        auto raised = hist;
        raised[t0].power *= 1.5;
        const auto up = optimality_gap_bound(raised, 1.0, p, 3, 12);
        REQUIRE(base);
        REQUIRE(up);
        CHECK(std::isfinite(base->total()));
        CHECK(up->total() <= base->total());
    }
}

TEST_CASE("divergent schedules are flagged") {
    auto p = params();
    p.eta = 2.0;  // sigma < 0
    CHECK_FALSE(optimality_gap_bound(std::vector<RoundHistory>{{1, 0.5, 1.0, 0.07}}, 1.0, p, 3, 12).has_value());
    RunningGapBound run(1.0, p, 3, 12);
    CHECK_FALSE(run.push(1, 0.1).has_value());
}

TEST_CASE("running bound agrees with the batch evaluator") {
    const auto p = params();
    std::mt19937_64 rng(9);
    std::vector<RoundHistory> hist;
    RunningGapBound run(1.0, p, 3, 12);
    for (int t = 0; t < 50; ++t) {
        RoundHistory h{std::uniform_int_distribution<int>(1, 5)(rng), 0.1 + 0.4 * (t % 7) / 7.0, 0.98, 0.07};
        hist.push_back(h);
        const auto step = run.push(h.S, interference_error(h.power, h.gain, h.interference, p.C));
        const auto batch = optimality_gap_bound(hist, 1.0, p, 3, 12);
        REQUIRE(step);
        REQUIRE(batch);
        CHECK(test::close_rel(*step, batch->total(), 1e-12));
    }
}
