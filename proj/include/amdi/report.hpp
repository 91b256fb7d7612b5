#pragma once

#include <json.hpp>

#include <optional>
#include <string>

#include "amdi/config.hpp"
#include "amdi/mc_oracle.hpp"
#include "amdi/optimizer.hpp"

namespace amdi {

inline constexpr const char* kJsonSchema = "amdi-report/1";
inline constexpr const char* kCsvSchema = "amdi-sweep-csv/1.0";

// Non-finite values become the strings "inf", "-inf", "nan".
nlohmann::json number_json(double x);

nlohmann::json config_json(const RunConfig& cfg);
nlohmann::json params_json(const SourceParams& p);
nlohmann::json key_rate_json(const KeyRateReport& r);
nlohmann::json optimization_json(const OptimizationResult& r);
nlohmann::json empirical_json(const EmpiricalStats& e);
nlohmann::json comparison_json(const ComparisonReport& c);

// Scientific notation with 17 significant digits.
std::string format_number(double x);

// Sweep table: one row per distance, baseline columns empty when absent.
std::string sweep_csv(const RunConfig& cfg, const SweepResult& primary, const std::optional<SweepResult>& baseline);

// Writes via a temporary file in the same directory and renames it into
// place. An empty path or "-" writes to stdout.
void write_atomic(const std::string& path, const std::string& content);

} // namespace amdi
