#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "capax/kkt.hpp"
#include "capax/solver.hpp"

namespace capax {

inline constexpr const char* kVersion = "1.0.0";

nlohmann::json kkt_to_json(const KktReport& report);

/// The full solve report: capacity, measure, multipliers, KKT summary,
/// support report, trace, the echoed config and the tool version.
nlohmann::json solution_to_json(const CapacitySolution& solution, const nlohmann::json& config_echo);

struct LoadedSolution {
    AtomicMeasure measure = AtomicMeasure::dirac(0.0);
    std::optional<std::vector<double>> multipliers;
    std::optional<double> capacity_bits;
};

/// Reads the measure block (and multipliers, when present) of a report.
/// Throws ConfigError on a malformed block or atoms whose dimension is not
/// `dim`.
LoadedSolution solution_from_json(const nlohmann::json& document, std::size_t dim = 1);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

std::string csv_header();
std::string csv_row(const std::string& value, const CapacitySolution& solution);
/// A row for a sweep point that failed before producing a solution.
std::string csv_failure_row(const std::string& value);

/// Writes to a temporary file beside `path` and renames it into place.
/// Throws Error when the file cannot be written.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace capax
