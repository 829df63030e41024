// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include "edgepipe/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace edgepipe {

namespace {

nlohmann::json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

nlohmann::json number(const std::optional<double>& v) { return v ? number(*v) : nlohmann::json(nullptr); }

template <class T>
nlohmann::json numbers(const std::vector<T>& values) {
    auto out = nlohmann::json::array();
    for (const auto& v : values) out.push_back(number(v));
    return out;
}

}  // namespace

nlohmann::json round_to_json(const RoundRecord& record, const TraceLog& log) {
    const auto& d = record.decision;
    const auto& m = record.metrics;

    auto plans = nlohmann::json::array();
    for (const auto& p : d.plans) plans.push_back({{"delta", p.delta}, {"S", p.S}, {"m", p.m}, {"b_hat", p.micro_batch}});
    auto channels = nlohmann::json::array();
    for (int j : d.assignment.raw()) channels.push_back(j == ChannelAssignment::kUnassigned ? nlohmann::json(nullptr) : nlohmann::json(j));

    return {
        {"schema_version", kTraceSchemaVersion},
        {"policy", log.policy},
        {"seed", log.seed},
        {"V", number(log.V)},
        {"round", m.round},
        {"plans", plans},
        {"channel", channels},
        {"power_w", numbers(d.powers)},
        {"tau_pipe_s", numbers(m.tau_pipe)},
        {"tau_up_s", numbers(m.tau_up)},
        {"tau_s", number(m.tau)},
        {"energy_pipe_j", numbers(m.energy_pipe)},
        {"energy_com_j", numbers(m.energy_com)},
        {"energy_sch_j", numbers(m.energy_sch)},
        {"gamma", number(m.gamma)},
        {"queues", numbers(m.queues)},
        {"drift_penalty", number(m.drift_penalty)},
        {"gap_bound", number(m.bound)},
        {"relaxed", m.relaxed},
    };
}

std::string trace_to_jsonl(const TraceLog& log) {
    std::string out;
    for (const auto& r : log.rounds) {
        out += round_to_json(r, log).dump();
        out += '\n';
    }
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string summary_csv_header() {
    return "policy,seed,V,rounds,avg_tau_s,cum_tau_s,avg_gamma,gamma_max,max_final_queue,avg_backlog\n";
}

std::string summary_csv_row(const TraceLog& log) {
    const auto& s = log.summary;
    return log.policy + ',' + std::to_string(log.seed) + ',' + format_number(log.V) + ',' + std::to_string(s.rounds) +
           ',' + format_number(s.avg_tau) + ',' + format_number(s.cum_tau) + ',' + format_number(s.avg_gamma) + ',' +
           format_number(s.gamma_max) + ',' + format_number(s.max_final_queue) + ',' + format_number(s.avg_backlog) +
           '\n';
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!f) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace edgepipe
