// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace edgepipe {

/// Raised while reading or validating a configuration file.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& reason)
        : std::runtime_error(field.empty() ? reason : field + ": " + reason), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A sub-problem has no point satisfying its constraints. `constraint` names
/// the first constraint found unsatisfiable (e.g. "C7", "C9'", "C11").
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(std::string constraint, const std::string& detail)
        : std::runtime_error("infeasible (" + constraint + "): " + detail), constraint_(std::move(constraint)) {}

    const std::string& constraint() const noexcept { return constraint_; }

private:
    std::string constraint_;
};

/// Physical-model failure: a zero-rate link asked to carry a nonzero payload.
class LinkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace edgepipe
