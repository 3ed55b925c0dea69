#pragma once

// Serialization: report.json holds the whole RunReport (lossless round trip, non-finite
// numbers as strings); path-<branch>.csv holds one row per point for plotting.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "homotrack/pipeline.hpp"

namespace homotrack {

using Json = nlohmann::json;

[[nodiscard]] Json to_json(const RunReport& report);
/// Throws NumericalError(InvalidConfig) on malformed input.
[[nodiscard]] RunReport report_from_json(const Json& j);

/// 17 significant digits, "nan"/"inf"/"-inf" for non-finite values.
[[nodiscard]] std::string format_number(double x);

/// Header `index,p,lambda_min,residual,u_norm` (+ `u_0..u_{n-1}` with full_state).
[[nodiscard]] std::string path_csv(const BranchRecord& branch, bool full_state);

/// Writes report.json and one path-<id>.csv per branch; returns the files written.
std::vector<std::filesystem::path> write_report(const RunReport& report, const std::filesystem::path& dir,
                                                bool full_state);

/// Deterministic table (no timings); compare_text adds wall time.
[[nodiscard]] std::string compare_csv(const std::vector<CompareRow>& rows);
[[nodiscard]] std::string compare_text(const std::vector<CompareRow>& rows);

}  // namespace homotrack
