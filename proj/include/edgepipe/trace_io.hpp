// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "edgepipe/orchestrator.hpp"

namespace edgepipe {

inline constexpr int kTraceSchemaVersion = 1;

nlohmann::json round_to_json(const RoundRecord& record, const TraceLog& log);

/// One JSON object per line, one line per round.
std::string trace_to_jsonl(const TraceLog& log);

std::string summary_csv_header();
std::string summary_csv_row(const TraceLog& log);

/// Writes to a sibling temporary file then renames over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

/// Fixed-format number rendering for CSV output ("%.17g").
std::string format_number(double v);

}  // namespace edgepipe
