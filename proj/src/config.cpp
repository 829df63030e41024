// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include "edgepipe/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "edgepipe/errors.hpp"

namespace edgepipe {

using nlohmann::json;

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) noexcept { return 10.0 * std::log10(linear); }

double dbm_per_hz_to_w_per_hz(double dbm) noexcept { return std::pow(10.0, (dbm - 30.0) / 10.0); }

int DeviceProfile::max_tebs() const noexcept {
    if (mem_per_teb <= 0.0) return 0;
    // Small epsilon so that exact multiples (1.5 GB / 0.25 GB) are not lost to rounding.
    return static_cast<int>(std::floor(mem_budget / mem_per_teb * (1.0 + 1e-12)));
}

namespace {

// Reads JSON objects while tracking the path for error messages and rejecting
// keys the schema does not know.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_, "expected an object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const std::string& key, double fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) return fallback;
        const auto& v = obj_.at(key);
        if (!v.is_number()) throw ConfigError(at(key), "expected a number");
        return v.get<double>();
    }

    double required_number(const std::string& key) {
        if (!obj_.contains(key)) throw ConfigError(at(key), "required field missing");
        return number(key, 0.0);
    }

    int integer(const std::string& key, int fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) return fallback;
        const auto& v = obj_.at(key);
        if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
        return v.get<int>();
    }

    // Accepts a scalar (point interval) or a two-element [lo, hi] array.
    Interval interval(const std::string& key, Interval fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) return fallback;
        const auto& v = obj_.at(key);
        if (v.is_number()) return {v.get<double>(), v.get<double>()};
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
            return {v[0].get<double>(), v[1].get<double>()};
        throw ConfigError(at(key), "expected a number or a [lo, hi] pair");
    }

    const json* child(const std::string& key) {
        seen_.insert(key);
        return obj_.contains(key) ? &obj_.at(key) : nullptr;
    }

    void finish() const {
        for (const auto& [key, _] : obj_.items())
            if (!seen_.contains(key)) throw ConfigError(at(key), "unknown field");
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

DeviceProfile read_device(const json& j, const std::string& path, const DeviceProfile& defaults, int& count) {
    Reader r(j, path);
    DeviceProfile d;
    d.flops_per_cycle = r.number("phi_flops_per_cycle", defaults.flops_per_cycle);
    d.clock_hz = r.interval("f_hz", defaults.clock_hz);
    d.d2d_power = r.number("p_k_w", defaults.d2d_power);
    d.d2d_power_max = r.number("P_k_max_w", defaults.d2d_power_max);
    d.mem_budget = r.number("gamma_k_max_bytes", defaults.mem_budget);
    d.mem_per_teb = r.number("gamma_0_bytes", defaults.mem_per_teb);
    d.energy_budget = r.number("E_k_max_j", defaults.energy_budget);
    d.capacitance = r.number("kappa", defaults.capacitance);
    count = r.integer("count", 1);
    if (count < 1) throw ConfigError(r.at("count"), "must be >= 1");
    r.finish();
    return d;
}

ClusterProfile read_cluster(const json& j, const std::string& path, const DeviceProfile& device_defaults) {
    Reader r(j, path);
    ClusterProfile c;
    c.cu_power_max = r.number("P_n_max_w", c.cu_power_max);
    c.cu_energy_budget = r.number("E_n_max_j", c.cu_energy_budget);
    c.uplink_bandwidth = r.number("B_up_hz", c.uplink_bandwidth);
    c.d2d_bandwidth = r.number("B_dd_hz", c.d2d_bandwidth);
    c.uplink_gain_db = r.interval("h_n_db", c.uplink_gain_db);
    c.d2d_gain_db = r.interval("h_dd_db", c.d2d_gain_db);
    c.uplink_interference = r.interval("I_i_w", c.uplink_interference);
    c.d2d_interference = r.interval("I_dd_w", c.d2d_interference);

    const json* devices = r.child("devices");
    if (devices == nullptr || !devices->is_array())
        throw ConfigError(r.at("devices"), "required array missing");
    for (std::size_t i = 0; i < devices->size(); ++i) {
        int count = 1;
        DeviceProfile d = read_device((*devices)[i], r.at("devices[" + std::to_string(i) + "]"), device_defaults, count);
        c.devices.insert(c.devices.end(), count, d);
    }
    r.finish();
    return c;
}

void require(bool ok, const std::string& field, const std::string& reason) {
    if (!ok) throw ConfigError(field, reason);
}

void require_interval(Interval v, const std::string& field, bool positive) {
    require(std::isfinite(v.lo) && std::isfinite(v.hi), field, "must be finite");
    require(v.lo <= v.hi, field, "interval lower bound exceeds upper bound");
    if (positive) require(v.lo > 0.0, field, "must be > 0");
}

}  // namespace

double default_interference_constant(const SystemConfig& cfg) {
    double denom = 0.0;
    for (const auto& c : cfg.clusters)
        denom += c.cu_power_max * db_to_linear(c.uplink_gain_db.mid()) + c.uplink_interference.mid();
    denom /= static_cast<double>(std::max<std::size_t>(1, cfg.clusters.size()));
    const double phi = cfg.convergence.phi_bound;
    return 0.1 * phi * phi * denom;
}

void validate(const SystemConfig& cfg) {
    const auto& m = cfg.model;
    require(m.L >= 1, "model.L", "must be >= 1");
    require(m.o_fwd > 0, "model.o_fwd_flops", "must be > 0");
    require(m.o_bwd > 0, "model.o_bwd_flops", "must be > 0");
    require(m.act_size_seg > 0, "model.z_seg_bits", "must be > 0");
    require(m.grad_size_seg > 0, "model.g_seg_bits", "must be > 0");
    require(m.act_size_enc > 0, "model.z_enc_bits", "must be > 0");
    require(m.enc_param_size > 0, "model.theta_enc_bits", "must be > 0");
    require(m.batch_size >= 1, "model.b", "must be >= 1");

    require(cfg.channels >= 1, "J", "must be >= 1");
    require(cfg.noise_density > 0 && std::isfinite(cfg.noise_density), "N0", "must be > 0");
    require(!cfg.clusters.empty(), "clusters", "need at least one cluster");

    const auto& p = cfg.convergence;
    require(p.beta > 0, "convergence.beta", "must be > 0");
    require(p.eta > 0, "convergence.eta", "must be > 0");
    require(p.xi > 0, "convergence.xi", "must be > 0");
    require(p.phi_bound > 0, "convergence.phi_bound", "must be > 0");
    require(p.C > 0, "convergence.C", "must be > 0");
    require(p.gamma_max > 0, "convergence.gamma_max_bound", "must be > 0");
    require(p.V > 0, "convergence.V", "must be > 0");
    require(p.initial_gap >= 0, "convergence.initial_gap", "must be >= 0");

    const auto& bl = cfg.baselines;
    require(bl.loss_amplitude > 0, "baselines.loss_amplitude", "must be > 0");
    require(bl.loss_decay_rounds > 0, "baselines.loss_decay_rounds", "must be > 0");
    require(bl.loss_noise >= 0 && bl.loss_noise < 1, "baselines.loss_noise", "must be in [0, 1)");

    for (std::size_t n = 0; n < cfg.clusters.size(); ++n) {
        const auto& c = cfg.clusters[n];
        const std::string cp = "clusters[" + std::to_string(n) + "]";
        require(!c.devices.empty(), cp + ".devices", "K must be >= 1");
        require(c.cu_power_max > 0, cp + ".P_n_max_w", "must be > 0");
        require(c.cu_energy_budget > 0, cp + ".E_n_max_j", "must be > 0");
        require(c.uplink_bandwidth > 0, cp + ".B_up_hz", "must be > 0");
        require(c.d2d_bandwidth > 0, cp + ".B_dd_hz", "must be > 0");
        require_interval(c.uplink_gain_db, cp + ".h_n_db", false);
        require_interval(c.d2d_gain_db, cp + ".h_dd_db", false);
        require_interval(c.uplink_interference, cp + ".I_i_w", false);
        require(c.uplink_interference.lo >= 0, cp + ".I_i_w", "must be >= 0");
        require_interval(c.d2d_interference, cp + ".I_dd_w", false);
        require(c.d2d_interference.lo >= 0, cp + ".I_dd_w", "must be >= 0");

        for (std::size_t k = 0; k < c.devices.size(); ++k) {
            const auto& d = c.devices[k];
            const std::string dp = cp + ".devices[" + std::to_string(k) + "]";
            require(d.flops_per_cycle > 0, dp + ".phi_flops_per_cycle", "must be > 0");
            require_interval(d.clock_hz, dp + ".f_hz", true);
            require(d.d2d_power > 0, dp + ".p_k_w", "must be > 0");
            require(d.d2d_power_max > 0, dp + ".P_k_max_w", "must be > 0");
            require(d.d2d_power <= d.d2d_power_max, dp + ".p_k_w", "exceeds P_k_max_w");
            require(d.mem_budget > 0, dp + ".gamma_k_max_bytes", "must be > 0");
            require(d.mem_per_teb > 0, dp + ".gamma_0_bytes", "must be > 0");
            require(d.mem_per_teb <= d.mem_budget, dp + ".gamma_0_bytes",
                    "C7: one TEB (gamma_0) does not fit the device memory budget gamma_k_max");
            require(d.energy_budget > 0, dp + ".E_k_max_j", "must be > 0");
            require(d.capacitance > 0, dp + ".kappa", "must be > 0");
        }
    }
}

SystemConfig parse_config(const json& doc) {
    Reader root(doc, "");
    SystemConfig cfg;

    const int version = root.integer("schema_version", 1);
    if (version != 1) throw ConfigError("schema_version", "unsupported version " + std::to_string(version));

    cfg.rng_seed = static_cast<std::uint64_t>(root.integer("rng_seed", 1));
    cfg.channels = root.integer("J", cfg.channels);
    if (root.has("N0_w_per_hz") && root.has("N0_dbm_per_hz"))
        throw ConfigError("N0_w_per_hz", "give either N0_w_per_hz or N0_dbm_per_hz, not both");
    if (root.has("N0_dbm_per_hz"))
        cfg.noise_density = dbm_per_hz_to_w_per_hz(root.number("N0_dbm_per_hz", -174.0));
    else
        cfg.noise_density = root.number("N0_w_per_hz", cfg.noise_density);

    if (const json* m = root.child("model")) {
        Reader r(*m, "model");
        auto& model = cfg.model;
        model.L = r.integer("L", model.L);
        model.o_fwd = r.number("o_fwd_flops", model.o_fwd);
        model.o_bwd = r.number("o_bwd_flops", model.o_bwd);
        model.act_size_seg = r.number("z_seg_bits", model.act_size_seg);
        model.grad_size_seg = r.number("g_seg_bits", model.grad_size_seg);
        model.act_size_enc = r.number("z_enc_bits", model.act_size_enc);
        model.enc_param_size = r.number("theta_enc_bits", model.enc_param_size);
        model.batch_size = r.integer("b", model.batch_size);
        r.finish();
    }

    bool derive_C = true;
    if (const json* c = root.child("convergence")) {
        Reader r(*c, "convergence");
        auto& p = cfg.convergence;
        p.beta = r.number("beta", p.beta);
        p.eta = r.number("eta", p.eta);
        p.xi = r.number("xi", p.xi);
        p.phi_bound = r.number("phi_bound", p.phi_bound);
        if (r.has("C")) {
            derive_C = false;
            p.C = r.number("C", 0.0);
        }
        p.gamma_max = r.number("gamma_max_bound", p.gamma_max);
        p.V = r.number("V", p.V);
        p.initial_gap = r.number("initial_gap", p.initial_gap);
        r.finish();
    }

    if (const json* b = root.child("baselines")) {
        Reader r(*b, "baselines");
        auto& bl = cfg.baselines;
        bl.loss_amplitude = r.number("loss_amplitude", bl.loss_amplitude);
        bl.loss_decay_rounds = r.number("loss_decay_rounds", bl.loss_decay_rounds);
        bl.loss_noise = r.number("loss_noise", bl.loss_noise);
        r.finish();
    }

    DeviceProfile device_defaults;
    if (const json* d = root.child("device_defaults")) {
        int count = 1;
        device_defaults = read_device(*d, "device_defaults", DeviceProfile{}, count);
    }

    const json* clusters = root.child("clusters");
    if (clusters == nullptr || !clusters->is_array()) throw ConfigError("clusters", "required array missing");
    for (std::size_t n = 0; n < clusters->size(); ++n) {
        const json& entry = (*clusters)[n];
        int repeat = 1;
        json body = entry;
        if (entry.is_object() && entry.contains("count")) {
            if (!entry.at("count").is_number_integer() || entry.at("count").get<int>() < 1)
                throw ConfigError("clusters[" + std::to_string(n) + "].count", "must be an integer >= 1");
            repeat = entry.at("count").get<int>();
            body.erase("count");
        }
        ClusterProfile c = read_cluster(body, "clusters[" + std::to_string(n) + "]", device_defaults);
        cfg.clusters.insert(cfg.clusters.end(), repeat, c);
    }
    root.finish();

    if (derive_C) cfg.convergence.C = default_interference_constant(cfg);
    validate(cfg);
    return cfg;
}

SystemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "parse error in '" + path.string() + "': " + e.what());
    }
    SystemConfig cfg = parse_config(doc);
    if (const char* seed = std::getenv("EDGEPIPE_SEED"); seed != nullptr && *seed != '\0') {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(seed, &end, 10);
        if (end == nullptr || *end != '\0') throw ConfigError("EDGEPIPE_SEED", "not an unsigned integer");
        cfg.rng_seed = v;
    }
    return cfg;
}

}  // namespace edgepipe
