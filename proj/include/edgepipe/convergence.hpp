// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>

#include "edgepipe/config.hpp"

namespace edgepipe {

/// eps(p) = C / (p h + I).
double interference_error(double power, double gain, double interference, double C);

/// sigma = eta xi - (beta eta^2 / 2)(1 + S^2 / (N L)). Not clamped.
double contraction_factor(const ConvergenceParams& params, int S, int N, int L);

/// Largest eta keeping sigma > 0: 2 xi / (beta (1 + S^2/(N L))).
double positive_contraction_threshold(const ConvergenceParams& params, int S, int N, int L);

/// Per-round balance bound (beta eta^2 / 2N)(phi^2 S^2 / L + eps + phi^2).
double gamma_round(int S, double epsilon, const ConvergenceParams& params, int N, int L);

/// Smallest interference error that still satisfies Gamma <= Gamma^max at
/// segment count S. Negative when S alone already exceeds the cap.
double epsilon_cap(int S, const ConvergenceParams& params, int N, int L);

/// Learning-rate admissibility threshold 4 xi N L / (beta (S^2 + L)).
double max_learning_rate(const ConvergenceParams& params, int S, int N, int L);

struct RoundHistory {
    int S = 1;
    double power = 0.0;
    double gain = 1.0;
    double interference = 0.0;
};

struct GapBound {
    double initial = 0.0;
    double task = 0.0;
    double interference = 0.0;

    double total() const noexcept { return initial + task + interference; }
};

/// Optimality-gap bound after T = history.size() rounds. nullopt marks a
/// divergent schedule (some sigma(t) outside (0, 1)). Throws on empty history.
std::optional<GapBound> optimality_gap_bound(std::span<const RoundHistory> history, double initial_gap,
                                             const ConvergenceParams& params, int N, int L);

/// Incremental form of the same bound, one round at a time.
class RunningGapBound {
public:
    RunningGapBound(double initial_gap, const ConvergenceParams& params, int N, int L);

    /// Folds one round in; returns the bound after it (nullopt once divergent).
    std::optional<double> push(int S, double epsilon);

private:
    ConvergenceParams params_;
    int N_;
    int L_;
    double initial_;
    double accumulated_ = 0.0;
    bool divergent_ = false;
};

}  // namespace edgepipe
