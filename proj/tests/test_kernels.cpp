// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "edgepipe/errors.hpp"
#include "edgepipe/kernels.hpp"
#include "support.hpp"

using namespace edgepipe;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("cluster scheduling is identical serially and in parallel") {
    std::mt19937_64 rng(81);
    for (int trial = 0; trial < 10; ++trial) {
        auto cfg = test::random_system(rng, 6, 5, 12, 64, 3);
        for (auto& c : cfg.clusters)
            for (auto& d : c.devices) d.mem_budget = 1e12;
        const auto env = sample_round_environment(cfg, 1);
        std::vector<SegmentProblem> problems;
        for (int n = 0; n < cfg.num_clusters(); ++n)
            problems.push_back(SegmentProblem::from(cfg, env, n, 0.1 * n, 1.0, 0.0, false));
        const auto s = schedule_all_clusters(problems, Exec::serial);
        const auto p = schedule_all_clusters(problems, Exec::parallel);
        REQUIRE(s.size() == p.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(s[i].plan == p[i].plan);
            CHECK(same_bits(s[i].objective, p[i].objective));
            CHECK(s[i].trajectory == p[i].trajectory);
        }
    }
}

TEST_CASE("the first infeasible cluster is rethrown") {
    auto cfg = test::homogeneous_system(2, 6, 8);
    cfg.clusters.push_back(cfg.clusters[0]);
    cfg.clusters.push_back(cfg.clusters[0]);
    for (auto& d : cfg.clusters[1].devices) d.mem_budget = 2.5e8;  // 2 TEBs total
    for (auto& d : cfg.clusters[2].devices) d.energy_budget = 1e-12;
    const auto env = sample_round_environment(cfg, 1);
    std::vector<SegmentProblem> problems;
    for (int n = 0; n < 3; ++n) problems.push_back(SegmentProblem::from(cfg, env, n, 0.0, 1.0, 0.0, false));
    for (auto exec : {Exec::serial, Exec::parallel}) {
        try {
            schedule_all_clusters(problems, exec);
            FAIL("expected infeasible");
        } catch (const InfeasibleError& e) {
            CHECK(e.constraint() == "C7");
        }
    }
}

TEST_CASE("latency grid is identical serially and in parallel") {
    const auto cfg = load_config(test::config_path("homogeneous.json"));
    const auto env = sample_round_environment(cfg, 1);
    std::vector<int> S{1, 2, 3, 4, 5, 6, 7}, m;
    for (int i = 1; i <= 64; ++i) m.push_back(i);
    const auto a = uniform_latency_grid(cfg, env, 0, S, m, Exec::serial);
    const auto b = uniform_latency_grid(cfg, env, 0, S, m, Exec::parallel);
    REQUIRE(a.tau.size() == S.size() * m.size());
    for (std::size_t i = 0; i < a.tau.size(); ++i) CHECK(same_bits(a.tau[i], b.tau[i]));
    // S = 7 exceeds the device count.
    for (std::size_t j = 0; j < m.size(); ++j) CHECK(std::isnan(a.at(6, j)));
}

TEST_CASE("latency grid cells equal the closed form") {
    auto cfg = test::homogeneous_system(4, 12, 32);
    const auto env = sample_round_environment(cfg, 1);
    const auto g = uniform_latency_grid(cfg, env, 0, {1, 2, 3, 4}, {1, 4, 32}, Exec::serial);
    for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t j = 0; j < 3; ++j) {
            const auto plan = SegmentPlan::make(balanced_delta(12, static_cast<int>(s) + 1, 4), g.m_values[j], 32);
            if (plan_violation(plan, cfg.clusters[0], cfg.model).empty())
                CHECK(same_bits(g.at(s, j), pipeline_latency(plan, cfg, env, 0)));
            else
                CHECK(std::isnan(g.at(s, j)));
        }
}
