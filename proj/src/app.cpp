#include "capax/app.hpp"

#include <cmath>

#include "capax/config.hpp"
#include "capax/errors.hpp"
#include "capax/report.hpp"

namespace capax {

using nlohmann::json;

namespace {

// Least-squares fit of i(x_j) = c + Σ γ_i g_i(x_j) over the atoms, for
// solution files written without multipliers. Peak indicators get γ = 0.
std::vector<double> fit_multipliers(const AtomicMeasure& measure, const Problem& problem, const OutputSchemes& schemes)
{
    const auto& spec = problem.constraints;
    std::vector<double> gamma(spec.size(), 0.0);
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < spec.size(); ++i)
        if (spec.function(i).kind() != ConstraintKind::peak_indicator) cols.push_back(i);
    const std::size_t k = cols.size() + 1;
    if (cols.empty() || measure.size() < k) return gamma;

    const OutputLaw law(measure, problem.channel, schemes);
    std::vector<double> a(k * k, 0.0);
    std::vector<double> b(k, 0.0);
    for (std::size_t j = 0; j < measure.size(); ++j) {
        std::vector<double> row{1.0};
        for (std::size_t i : cols) row.push_back(spec.function(i)(measure.x(j)));
        const double target = law.information_density(measure.x(j));
        for (std::size_t r = 0; r < k; ++r) {
            b[r] += row[r] * target;
            for (std::size_t c = 0; c < k; ++c) a[r * k + c] += row[r] * row[c];
        }
    }
    // Gaussian elimination with partial pivoting on the normal equations.
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::abs(a[r * k + c]) > std::abs(a[piv * k + c])) piv = r;
        if (std::abs(a[piv * k + c]) < 1e-14) return gamma;
        for (std::size_t t = 0; t < k; ++t) std::swap(a[c * k + t], a[piv * k + t]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < k; ++r) {
            const double f = a[r * k + c] / a[c * k + c];
            for (std::size_t t = c; t < k; ++t) a[r * k + t] -= f * a[c * k + t];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> sol(k);
    for (std::size_t c = k; c-- > 0;) {
        double s = b[c];
        for (std::size_t t = c + 1; t < k; ++t) s -= a[c * k + t] * sol[t];
        sol[c] = s / a[c * k + c];
    }
    for (std::size_t m = 0; m < cols.size(); ++m) gamma[cols[m]] = std::max(0.0, sol[m + 1]);
    return gamma;
}

RunConfig load_config(const std::string& path)
{
    return parse_config(read_json_file(path));
}

void emit(const std::optional<std::string>& path, const std::string& content, std::ostream& out)
{
    if (path)
        write_file_atomic(*path, content);
    else
        out << content;
}

}  // namespace

int run_solve(const SolveCommand& cmd, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    std::optional<Problem> problem;
    try {
        json doc = read_json_file(cmd.config_path);
        if (cmd.seed) {
            if (!doc.is_object()) throw ConfigError("config: expected an object");
            doc["solver"]["seed"] = *cmd.seed;
        }
        cfg = parse_config(doc);
        problem = build_problem(cfg);
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    CapacitySolution solution;
    try {
        solution = solve(*problem, cfg.solver);
    } catch (const Error& e) {
        err << "solve failed: " << e.what() << "\n";
        return kExitNotCertified;
    }
    const std::string report = solution_to_json(solution, cfg.source).dump(2) + "\n";
    try {
        emit(cmd.out_path ? cmd.out_path : cfg.output.report, report, out);
    } catch (const Error& e) {
        err << "output error: " << e.what() << "\n";
        return kExitConfigError;
    }
    const double residual = std::max(solution.kkt.max_off_support_violation, solution.kkt.max_on_support_residual);
    err << "capacity_bits " << format_number(solution.capacity_bits) << ", "
        << (solution.certified ? "certified" : "non_certified") << ", atoms " << solution.measure.size()
        << ", max residual " << format_number(residual) << "\n";
    return solution.certified ? kExitOk : kExitNotCertified;
}

int run_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    std::optional<Problem> problem;
    LoadedSolution loaded;
    try {
        cfg = load_config(cmd.config_path);
        problem = build_problem(cfg);
        loaded = solution_from_json(read_json_file(cmd.solution_path), 1);
        if (loaded.multipliers && loaded.multipliers->size() != problem->constraints.size())
            throw ConfigError("solution: " + std::to_string(loaded.multipliers->size()) + " multipliers for " +
                              std::to_string(problem->constraints.size()) + " constraints");
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    try {
        const OutputSchemes schemes = problem_schemes(*problem, cfg.solver);
        const std::vector<double> gamma =
            loaded.multipliers ? *loaded.multipliers : fit_multipliers(loaded.measure, *problem, schemes);
        const double capacity = mutual_information(loaded.measure, problem->channel, schemes).bits;
        VerifyOptions opt;
        opt.kkt_tol = cfg.solver.kkt_tol;
        opt.grid_points = std::max(cfg.solver.verify_points, 10 * loaded.measure.size());
        const Verification v = verify(loaded.measure, gamma, capacity, *problem, schemes, opt);
        json report = kkt_to_json(v.report);
        report["multipliers"] = gamma;
        out << report.dump(2) << "\n";
        return v.report.certified ? kExitOk : kExitNotCertified;
    } catch (const ArgumentError& e) {
        err << "verify error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const Error& e) {
        err << "verify failed: " << e.what() << "\n";
        return kExitNotCertified;
    }
}

int run_sweep(const SweepCommand& cmd, std::ostream& out, std::ostream& err)
{
    json base;
    RunConfig base_cfg;
    try {
        base = read_json_file(cmd.config_path);
        base_cfg = parse_config(base);
        if (cmd.values.empty()) throw ConfigError("sweep: no values given");
        json probe = base;
        apply_override(probe, cmd.parameter, cmd.values.front());
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    std::string csv = csv_header();
    bool all_certified = true;
    for (const auto& value : cmd.values) {
        try {
            json doc = base;
            apply_override(doc, cmd.parameter, value);
            const RunConfig cfg = parse_config(doc);
            const CapacitySolution s = solve(build_problem(cfg), cfg.solver);
            csv += csv_row(value, s);
            all_certified = all_certified && s.certified;
        } catch (const Error& e) {
            err << "sweep value " << value << ": " << e.what() << "\n";
            csv += csv_failure_row(value);
            all_certified = false;
        }
    }
    try {
        emit(cmd.out_path ? cmd.out_path : base_cfg.output.csv, csv, out);
    } catch (const Error& e) {
        err << "output error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return all_certified ? kExitOk : kExitNotCertified;
}

int run_selftest_command(const SelftestOptions& options, std::ostream& out)
{
    bool ok = true;
    for (const auto& r : run_selftest(options)) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        ok = ok && r.passed;
    }
    out << (ok ? "selftest passed" : "selftest failed") << "\n";
    return ok ? kExitOk : kExitNotCertified;
}

}  // namespace capax
