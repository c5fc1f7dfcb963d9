#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "capax/oracle.hpp"
#include "capax/problem.hpp"
#include "capax/solver.hpp"

namespace capax {

struct ChannelSection {
    std::string type;  // awgn | fading | rayleigh_surrogate | finite
    double noise_std = 1.0;
    double fade_std = 1.0;
    std::vector<std::vector<double>> matrix;
};

struct StateSection {
    std::vector<double> gains;
    std::vector<double> probs;
};

struct SideInfoSection {
    SideInfoKind kind = SideInfoKind::none;
    std::size_t bins = 1;
};

struct ConstraintSection {
    std::string type;  // average_power | peak | moment
    double limit = 0.0;
    double order = 2.0;
};

struct OutputSection {
    std::optional<std::string> report;
    std::optional<std::string> csv;
};

struct RunConfig {
    ChannelSection channel;
    std::optional<StateSection> state;
    SideInfoSection side_info;
    std::vector<ConstraintSection> constraints;
    SolverConfig solver;
    double domain_halfwidth = 3.0;
    OutputSection output;
    /// The document the config was read from, echoed into reports.
    nlohmann::json source;
};

/// Validates a parsed document and converts it. Unknown keys, missing
/// required keys and out-of-range values throw ConfigError naming the field.
RunConfig parse_config(const nlohmann::json& document);

/// Parses JSON text; syntax errors throw ConfigError with line and column.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);

nlohmann::json read_json_file(const std::string& path);

/// Sets the value at a dotted path such as "channel.noise_std". The text is
/// stored as a number when it parses as one, otherwise as a string.
/// "side_info.bins" also accepts "none" and "full", which switch the kind.
void apply_override(nlohmann::json& document, const std::string& path, const std::string& value);

Problem build_problem(const RunConfig& config);

}  // namespace capax
