// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include "edgepipe/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <set>
#include <sstream>

#include "edgepipe/errors.hpp"
#include "edgepipe/kernels.hpp"
#include "edgepipe/orchestrator.hpp"
#include "edgepipe/seg_solver.hpp"
#include "edgepipe/trace_io.hpp"

namespace edgepipe::cli {

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

int parse_int(const std::string& s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
    return v;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

void append_ints(const std::string& item, std::vector<int>& out) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
        out.push_back(parse_int(item));
        return;
    }
    const int lo = parse_int(item.substr(0, dots));
    const int hi = parse_int(item.substr(dots + 2));
    if (lo > hi) throw std::invalid_argument("empty range '" + item + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv("EDGEPIPE_OUT_DIR"); env && *env) return env;
    return "out";
}

SystemConfig load_with_seed(const std::string& path, const std::optional<std::uint64_t>& seed) {
    auto cfg = load_config(path);
    if (seed) cfg.rng_seed = *seed;
    return cfg;
}

std::string run_line(const TraceLog& log) {
    std::ostringstream os;
    os << "policy=" << log.policy << " seed=" << log.seed << " rounds=" << log.summary.rounds
       << " avg_tau_s=" << format_number(log.summary.avg_tau) << " avg_gamma=" << format_number(log.summary.avg_gamma)
       << " gamma_max=" << format_number(log.summary.gamma_max)
       << " max_final_Y=" << format_number(log.summary.max_final_queue);
    return os.str();
}

int cmd_run(const std::string& config, const std::string& policy, int rounds, const std::optional<std::uint64_t>& seed,
            const std::filesystem::path& out_dir, std::ostream& out) {
    const auto cfg = load_with_seed(config, seed);
    const auto log = run_simulation(cfg, rounds, parse_policy(policy));
    atomic_write(out_dir / "trace.jsonl", trace_to_jsonl(log));
    atomic_write(out_dir / "summary.csv", summary_csv_header() + summary_csv_row(log));
    out << run_line(log) << '\n';
    return kOk;
}

int cmd_compare(const std::string& config, const std::vector<std::string>& policies, int rounds,
                const std::vector<std::uint64_t>& seeds, const std::filesystem::path& out_dir, std::ostream& out) {
    std::vector<Policy> parsed;
    std::set<Policy> seen;
    for (const auto& name : policies) {
        const Policy p = parse_policy(name);
        if (!seen.insert(p).second) throw UsageError("duplicate policy '" + name + "'");
        parsed.push_back(p);
    }
    std::set<std::uint64_t> seen_seeds;
    for (auto s : seeds)
        if (!seen_seeds.insert(s).second) throw UsageError("duplicate seed " + std::to_string(s));

    const auto base = load_config(config);
    std::string curves = "policy,seed,round,tau_cum_s\n";
    std::string summary = summary_csv_header();
    for (Policy p : parsed) {
        for (auto seed : seeds) {
            auto cfg = base;
            cfg.rng_seed = seed;
            const auto log = run_simulation(cfg, rounds, p);
            double cum = 0.0;
            for (const auto& r : log.rounds) {
                cum += r.metrics.tau;
                curves += log.policy + ',' + std::to_string(seed) + ',' + std::to_string(r.metrics.round) + ',' +
                          format_number(cum) + '\n';
            }
            summary += summary_csv_row(log);
            out << run_line(log) << '\n';
        }
    }
    atomic_write(out_dir / "compare.csv", curves);
    atomic_write(out_dir / "summary.csv", summary);
    return kOk;
}

int cmd_sweep(const std::string& config, const std::string& grid_spec, int cluster, int round, int rounds,
              const std::optional<std::uint64_t>& seed, const std::filesystem::path& out_dir, std::ostream& out) {
    GridSpec grid;
    try {
        grid = parse_grid(grid_spec);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--grid: ") + e.what());
    }
    const auto cfg = load_with_seed(config, seed);

    if (!grid.V.empty()) {
        std::string csv = "V,avg_tau_s,cum_tau_s,avg_gamma,avg_backlog,max_final_queue\n";
        for (double V : grid.V) {
            auto c = cfg;
            c.convergence.V = V;
            const auto log = run_simulation(c, rounds, Policy::dssra);
            const auto& s = log.summary;
            csv += format_number(V) + ',' + format_number(s.avg_tau) + ',' + format_number(s.cum_tau) + ',' +
                   format_number(s.avg_gamma) + ',' + format_number(s.avg_backlog) + ',' +
                   format_number(s.max_final_queue) + '\n';
            out << "V=" << format_number(V) << " avg_tau_s=" << format_number(s.avg_tau)
                << " avg_backlog=" << format_number(s.avg_backlog) << '\n';
        }
        atomic_write(out_dir / "sweep_v.csv", csv);
        return kOk;
    }

    if (cluster < 0 || cluster >= cfg.num_clusters()) throw UsageError("--cluster out of range");
    const auto env = sample_round_environment(cfg, round);
    const auto lat = uniform_latency_grid(cfg, env, cluster, grid.S, grid.m, Exec::parallel);

    std::string csv = "S\\m";
    for (int m : grid.m) csv += ',' + std::to_string(m);
    csv += '\n';
    double best = std::numeric_limits<double>::infinity();
    int best_S = 0, best_m = 0;
    for (std::size_t i = 0; i < grid.S.size(); ++i) {
        csv += std::to_string(grid.S[i]);
        for (std::size_t k = 0; k < grid.m.size(); ++k) {
            const double tau = lat.at(i, k);
            csv += ',' + format_number(tau);
            if (std::isfinite(tau) && tau < best) {
                best = tau;
                best_S = grid.S[i];
                best_m = grid.m[k];
            }
        }
        csv += '\n';
    }
    atomic_write(out_dir / "sweep_sm.csv", csv);
    if (std::isfinite(best))
        out << "argmin S=" << best_S << " m=" << best_m << " tau_s=" << format_number(best) << '\n';
    else
        out << "argmin none (every cell infeasible)\n";
    return kOk;
}

}  // namespace

GridSpec parse_grid(const std::string& spec) {
    GridSpec g;
    std::string key;
    std::set<std::string> keys;
    for (const auto& raw : split(spec, ',')) {
        if (raw.empty()) throw std::invalid_argument("empty grid item in '" + spec + "'");
        std::string value = raw;
        if (const auto eq = raw.find('='); eq != std::string::npos) {
            key = trim(raw.substr(0, eq));
            value = trim(raw.substr(eq + 1));
            if (key != "S" && key != "m" && key != "V") throw std::invalid_argument("unknown grid key '" + key + "'");
            if (!keys.insert(key).second) throw std::invalid_argument("grid key '" + key + "' given twice");
        } else if (key.empty()) {
            throw std::invalid_argument("grid item '" + raw + "' has no key");
        }
        if (value.empty()) throw std::invalid_argument("grid key '" + key + "' has no value");
        if (key == "V") {
            const double v = parse_double(value);
            if (!(v > 0.0)) throw std::invalid_argument("V must be positive");
            g.V.push_back(v);
        } else {
            append_ints(value, key == "S" ? g.S : g.m);
        }
    }
    if (!g.V.empty() && (!g.S.empty() || !g.m.empty()))
        throw std::invalid_argument("a grid is either S/m or V, not both");
    if (g.V.empty() && (g.S.empty() || g.m.empty())) throw std::invalid_argument("an S/m grid needs both S and m");
    for (int v : g.S)
        if (v < 1) throw std::invalid_argument("S values must be >= 1");
    for (int v : g.m)
        if (v < 1) throw std::invalid_argument("m values must be >= 1");
    return g;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"edgepipe: pipeline-parallel edge training scheduler and simulator", "edgepipe"};
    app.require_subcommand(1);

    std::string config;
    std::string policy = "dssra";
    std::vector<std::string> policies{"dssra", "random", "loss-only", "delay-only"};
    int rounds = 200;
    std::optional<std::uint64_t> seed;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::string out_dir = default_out_dir().string();
    std::string grid_spec;
    int cluster = 0;
    int round = 1;

    auto* run_cmd = app.add_subcommand("run", "simulate one policy and write trace.jsonl and summary.csv");
    run_cmd->add_option("config", config, "config file")->required();
    run_cmd->add_option("--policy", policy, "dssra|random|loss-only|delay-only|uniform-split");
    run_cmd->add_option("--rounds", rounds, "number of rounds T")->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--seed", seed, "override the config seed");
    run_cmd->add_option("--out", out_dir, "output directory");

    auto* cmp_cmd = app.add_subcommand("compare", "run several policies over several seeds; write compare.csv");
    cmp_cmd->add_option("config", config, "config file")->required();
    cmp_cmd->add_option("--policies", policies, "policy list")->delimiter(',');
    cmp_cmd->add_option("--rounds", rounds, "number of rounds T")->check(CLI::NonNegativeNumber);
    cmp_cmd->add_option("--seeds", seeds, "seed list")->delimiter(',');
    cmp_cmd->add_option("--out", out_dir, "output directory");

    auto* sweep_cmd = app.add_subcommand("sweep", "latency surface over (S, m) or a V sweep; write sweep_*.csv");
    sweep_cmd->add_option("config", config, "config file")->required();
    sweep_cmd->add_option("--grid", grid_spec, "\"S=1..6,m=1..16\" or \"V=0.01,10,100\"")->required();
    sweep_cmd->add_option("--cluster", cluster, "cluster index for S/m grids");
    sweep_cmd->add_option("--round", round, "environment round for S/m grids")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--rounds", rounds, "rounds per V setting")->check(CLI::NonNegativeNumber);
    sweep_cmd->add_option("--seed", seed, "override the config seed");
    sweep_cmd->add_option("--out", out_dir, "output directory");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(config, policy, rounds, seed, out_dir, out);
        if (cmp_cmd->parsed()) return cmd_compare(config, policies, rounds, seeds, out_dir, out);
        return cmd_sweep(config, grid_spec, cluster, round, rounds, seed, out_dir, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

}  // namespace edgepipe::cli
