// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include "edgepipe/convergence.hpp"

#include <stdexcept>

namespace edgepipe {

double interference_error(double power, double gain, double interference, double C) {
    return C / (power * gain + interference);
}

double contraction_factor(const ConvergenceParams& p, int S, int N, int L) {
    const double s2 = static_cast<double>(S) * S;
    return p.eta * p.xi - 0.5 * p.beta * p.eta * p.eta * (1.0 + s2 / (static_cast<double>(N) * L));
}

double positive_contraction_threshold(const ConvergenceParams& p, int S, int N, int L) {
    const double s2 = static_cast<double>(S) * S;
    return 2.0 * p.xi / (p.beta * (1.0 + s2 / (static_cast<double>(N) * L)));
}

double gamma_round(int S, double epsilon, const ConvergenceParams& p, int N, int L) {
    const double phi2 = p.phi_bound * p.phi_bound;
    const double s2 = static_cast<double>(S) * S;
    return p.beta * p.eta * p.eta / (2.0 * N) * (phi2 * s2 / L + epsilon + phi2);
}

double epsilon_cap(int S, const ConvergenceParams& p, int N, int L) {
    const double phi2 = p.phi_bound * p.phi_bound;
    const double s2 = static_cast<double>(S) * S;
    return 2.0 * N * p.gamma_max / (p.beta * p.eta * p.eta) - phi2 * s2 / L - phi2;
}

double max_learning_rate(const ConvergenceParams& p, int S, int N, int L) {
    const double s2 = static_cast<double>(S) * S;
    return 4.0 * p.xi * N * L / (p.beta * (s2 + L));
}

namespace {

double task_term(const ConvergenceParams& p, int S, int N, int L) {
    const double s2 = static_cast<double>(S) * S;
    return p.beta * p.eta * p.eta * p.phi_bound * p.phi_bound / N * (s2 / L + 1.0);
}

bool admissible(double sigma) { return sigma > 0.0 && sigma < 1.0; }

}  // namespace

std::optional<GapBound> optimality_gap_bound(std::span<const RoundHistory> history, double initial_gap,
                                             const ConvergenceParams& params, int N, int L) {
    if (history.empty()) throw std::invalid_argument("optimality_gap_bound: empty history");
    const std::size_t T = history.size();
    std::vector<double> sigma(T);
    for (std::size_t t = 0; t < T; ++t) {
        sigma[t] = contraction_factor(params, history[t].S, N, L);
        if (!admissible(sigma[t])) return std::nullopt;
    }

    GapBound out;
    double initial_factor = 1.0;
    for (double s : sigma) initial_factor *= 1.0 - 2.0 * s;
    out.initial = initial_factor * initial_gap;

    for (std::size_t t = 0; t < T; ++t) {
        double weight = 1.0;
        for (std::size_t j = t + 1; j < T; ++j) weight *= 1.0 - sigma[j];
        const auto& h = history[t];
        out.task += weight * task_term(params, h.S, N, L);
        out.interference += weight * params.eta / N * interference_error(h.power, h.gain, h.interference, params.C);
    }
    return out;
}

RunningGapBound::RunningGapBound(double initial_gap, const ConvergenceParams& params, int N, int L)
    : params_(params), N_(N), L_(L), initial_(initial_gap) {}

std::optional<double> RunningGapBound::push(int S, double epsilon) {
    const double sigma = contraction_factor(params_, S, N_, L_);
    if (!admissible(sigma)) divergent_ = true;
    if (divergent_) return std::nullopt;
    initial_ *= 1.0 - 2.0 * sigma;
    accumulated_ = (1.0 - sigma) * accumulated_ + task_term(params_, S, N_, L_) + params_.eta / N_ * epsilon;
    return initial_ + accumulated_;
}

}  // namespace edgepipe
