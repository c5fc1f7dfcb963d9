#include "capax/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "capax/errors.hpp"

namespace capax {

using nlohmann::json;

namespace {

// JSON has no infinities; they are written as null.
json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

}  // namespace

json kkt_to_json(const KktReport& r)
{
    json slack = json::array();
    for (double s : r.slackness_residuals) slack.push_back(number_or_null(s));
    return json{{"max_off_support_violation", number_or_null(r.max_off_support_violation)},
                {"max_on_support_residual", number_or_null(r.max_on_support_residual)},
                {"slackness", slack},
                {"feasible", r.feasible},
                {"certified", r.certified},
                {"kkt_tol", r.kkt_tol},
                {"capacity_bits", number_or_null(r.capacity_bits)},
                {"worst_location", number_or_null(r.worst_location)},
                {"grid", {{"lo", r.grid.lo}, {"hi", r.grid.hi}, {"points", r.grid_count}}}};
}

json solution_to_json(const CapacitySolution& s, const json& config_echo)
{
    json atoms = json::array();
    for (std::size_t j = 0; j < s.measure.size(); ++j) {
        const auto loc = s.measure.location(j);
        atoms.push_back({{"x", std::vector<double>(loc.begin(), loc.end())}, {"p", s.measure.weight(j)}});
    }
    json trace = json::array();
    for (const auto& t : s.trace)
        trace.push_back({{"iteration", t.iteration},
                         {"lagrangian_bits", number_or_null(t.lagrangian_bits)},
                         {"max_residual", number_or_null(t.max_residual)},
                         {"atoms", t.atoms}});
    return json{{"capacity_bits", s.capacity_bits},
                {"certified", s.certified},
                {"measure", {{"atoms", atoms}}},
                {"multipliers", s.multipliers},
                {"kkt", kkt_to_json(s.kkt)},
                {"support",
                 {{"atom_count", s.support.atom_count},
                  {"classification", to_string(s.support.classification)},
                  {"min_separation", number_or_null(s.support.min_separation)},
                  {"near_zero_rho_fraction", s.support.near_zero_rho_fraction}}},
                {"iterations", s.iterations},
                {"trace", trace},
                {"config_echo", config_echo},
                {"version", kVersion}};
}

LoadedSolution solution_from_json(const json& document, std::size_t dim)
{
    if (!document.is_object() || !document.contains("measure"))
        throw ConfigError("solution: missing field 'measure'");
    const json& m = document.at("measure");
    if (!m.is_object() || !m.contains("atoms") || !m.at("atoms").is_array() || m.at("atoms").empty())
        throw ConfigError("solution: field 'measure.atoms' must be a nonempty array");
    std::vector<double> coords;
    std::vector<double> weights;
    const json& atoms = m.at("atoms");
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        const std::string f = "measure.atoms[" + std::to_string(j) + "]";
        const json& a = atoms[j];
        if (!a.is_object() || !a.contains("x") || !a.contains("p"))
            throw ConfigError("solution: field '" + f + "' needs 'x' and 'p'");
        const json& x = a.at("x");
        if (!x.is_array()) throw ConfigError("solution: field '" + f + ".x' must be an array");
        if (x.size() != dim)
            throw ConfigError("solution: field '" + f + ".x' has dimension " + std::to_string(x.size()) +
                              " but the channel input has dimension " + std::to_string(dim));
        for (const auto& c : x) {
            if (!c.is_number()) throw ConfigError("solution: field '" + f + ".x' must hold numbers");
            coords.push_back(c.get<double>());
        }
        if (!a.at("p").is_number()) throw ConfigError("solution: field '" + f + ".p' must be a number");
        weights.push_back(a.at("p").get<double>());
    }
    LoadedSolution out;
    try {
        out.measure = AtomicMeasure(dim, std::move(coords), std::move(weights));
    } catch (const ArgumentError& e) {
        throw ConfigError("solution: field 'measure': " + std::string(e.what()));
    }
    if (document.contains("multipliers")) {
        const json& g = document.at("multipliers");
        if (!g.is_array()) throw ConfigError("solution: field 'multipliers' must be an array");
        std::vector<double> gamma;
        for (const auto& v : g) {
            if (!v.is_number()) throw ConfigError("solution: field 'multipliers' must hold numbers");
            gamma.push_back(v.get<double>());
        }
        out.multipliers = std::move(gamma);
    }
    if (document.contains("capacity_bits") && document.at("capacity_bits").is_number())
        out.capacity_bits = document.at("capacity_bits").get<double>();
    return out;
}

std::string format_number(double value)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

std::string csv_header()
{
    return "value,capacity_bits,certified,atoms,max_residual\n";
}

std::string csv_row(const std::string& value, const CapacitySolution& s)
{
    const double residual = std::max(s.kkt.max_off_support_violation, s.kkt.max_on_support_residual);
    return value + "," + format_number(s.capacity_bits) + "," + (s.certified ? "true" : "false") + "," +
           std::to_string(s.measure.size()) + "," + format_number(residual) + "\n";
}

std::string csv_failure_row(const std::string& value)
{
    return value + ",nan,error,0,nan\n";
}

void write_file_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error("cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("cannot move output into place at " + path);
    }
}

}  // namespace capax
