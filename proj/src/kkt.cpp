#include "capax/kkt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "capax/errors.hpp"

namespace capax {

double rho(double x, const OutputLaw& law, const ConstraintSpec& constraints, std::span<const double> gamma,
           double capacity_bits)
{
    if (gamma.size() != constraints.size())
        throw ArgumentError("rho: " + std::to_string(gamma.size()) + " multipliers for " +
                            std::to_string(constraints.size()) + " constraints");
    double value = law.information_density(x) - capacity_bits;
    for (std::size_t i = 0; i < constraints.size(); ++i)
        value -= gamma[i] * (constraints.function(i)(x) - constraints.bound(i));
    return value;
}

double rho(double x, const AtomicMeasure& optimum, std::span<const double> gamma, double capacity_bits,
           const MarginalChannel& channel, const ConstraintSpec& constraints, const OutputSchemes& schemes)
{
    const OutputLaw law(optimum, channel, schemes);
    return rho(x, law, constraints, gamma, capacity_bits);
}

Verification verify(const AtomicMeasure& optimum, std::span<const double> gamma, double capacity_bits,
                    const Problem& problem, const OutputSchemes& schemes, const VerifyOptions& options)
{
    if (optimum.dim() != 1) throw ArgumentError("verify: only one-dimensional inputs are supported");
    if (!(options.kkt_tol > 0.0)) throw ArgumentError("verify: kkt_tol must be > 0");
    for (double g : gamma)
        if (!(g >= 0.0)) throw ArgumentError("verify: multipliers must be >= 0");

    Verification out;
    RhoScan& scan = out.scan;
    KktReport& report = out.report;
    const auto atoms = optimum.locations();

    if (problem.domain.is_finite()) {
        for (double x : atoms)
            if (!problem.domain.contains(x, 1e-9))
                throw ArgumentError("verify: atom at " + std::to_string(x) + " is not an alphabet point");
        scan.x = problem.domain.points();
        report.grid = {problem.domain.lo(), problem.domain.hi()};
    } else {
        const Interval g = options.grid.value_or(Interval{problem.domain.lo(), problem.domain.hi()});
        if (!(g.hi > g.lo)) throw ArgumentError("verify: empty grid");
        if (options.grid_points < 2 || options.grid_points < 10 * optimum.size())
            throw ArgumentError("verify: grid needs at least 10 points per atom");
        for (double x : atoms)
            if (x < g.lo - 1e-12 * (1.0 + std::abs(x)) || x > g.hi + 1e-12 * (1.0 + std::abs(x)))
                throw ArgumentError("verify: grid [" + std::to_string(g.lo) + ", " + std::to_string(g.hi) +
                                    "] does not cover the atom at " + std::to_string(x));
        const std::size_t n = options.grid_points;
        scan.x.resize(n);
        const double h = (g.hi - g.lo) / static_cast<double>(n - 1);
        for (std::size_t k = 0; k < n; ++k)
            scan.x[k] = k <= (n - 1) / 2 ? g.lo + h * static_cast<double>(k) : g.hi - h * static_cast<double>(n - 1 - k);
        report.grid = g;
    }
    scan.grid_count = scan.x.size();
    report.grid_count = scan.grid_count;
    scan.on_support.assign(scan.grid_count, false);
    for (std::size_t k = 0; k < scan.grid_count; ++k)
        scan.on_support[k] = std::find(atoms.begin(), atoms.end(), scan.x[k]) != atoms.end();
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        scan.x.push_back(atoms[j]);
        scan.on_support.push_back(true);
        if (!problem.domain.is_finite() && j + 1 < atoms.size()) {
            scan.x.push_back(0.5 * (atoms[j] + atoms[j + 1]));
            scan.on_support.push_back(false);
        }
    }

    const OutputLaw law(optimum, problem.channel, schemes);
    scan.rho.resize(scan.x.size());
    for (std::size_t k = 0; k < scan.x.size(); ++k)
        scan.rho[k] = rho(scan.x[k], law, problem.constraints, gamma, capacity_bits);

    report.kkt_tol = options.kkt_tol;
    report.capacity_bits = capacity_bits;
    report.max_off_support_violation = -std::numeric_limits<double>::infinity();
    report.max_on_support_residual = 0.0;
    for (std::size_t k = 0; k < scan.x.size(); ++k) {
        if (scan.on_support[k]) continue;
        if (scan.rho[k] > report.max_off_support_violation) {
            report.max_off_support_violation = scan.rho[k];
            report.worst_location = scan.x[k];
        }
    }
    if (!std::isfinite(report.max_off_support_violation) && report.max_off_support_violation < 0.0)
        report.max_off_support_violation = 0.0;  // every verification point is an atom
    for (std::size_t j = 0; j < optimum.size(); ++j) {
        if (optimum.weight(j) <= 0.0) continue;
        const double r = rho(atoms[j], law, problem.constraints, gamma, capacity_bits);
        report.max_on_support_residual = std::max(report.max_on_support_residual, std::abs(r));
    }

    const Feasibility feas = is_feasible(optimum, problem.constraints);
    report.feasible = feas.feasible && measure_in_domain(optimum, problem.domain);
    bool slack_ok = true;
    for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
        const double s = gamma[i] == 0.0 ? 0.0 : gamma[i] * (-feas.slacks[i]);
        report.slackness_residuals.push_back(s);
        if (std::abs(s) > kSlacknessTol) slack_ok = false;
    }
    report.certified = report.feasible && slack_ok && report.max_off_support_violation <= options.kkt_tol &&
                       report.max_on_support_residual <= options.kkt_tol;
    return out;
}

std::string to_string(SupportClass c)
{
    return c == SupportClass::discrete ? "discrete" : "dense_suspected";
}

SupportReport support_report(const AtomicMeasure& optimum, const Verification& verification)
{
    SupportReport out;
    out.atom_count = optimum.size();
    out.min_separation = std::numeric_limits<double>::infinity();
    const auto atoms = optimum.locations();
    for (std::size_t j = 1; j < atoms.size(); ++j) out.min_separation = std::min(out.min_separation, atoms[j] - atoms[j - 1]);

    const auto& scan = verification.scan;
    std::size_t off = 0;
    std::size_t near_zero = 0;
    for (std::size_t k = 0; k < scan.grid_count; ++k) {
        if (scan.on_support[k]) continue;
        ++off;
        if (std::abs(scan.rho[k]) < verification.report.kkt_tol) ++near_zero;
    }
    out.near_zero_rho_fraction = off == 0 ? 0.0 : static_cast<double>(near_zero) / static_cast<double>(off);
    out.classification = out.near_zero_rho_fraction > 0.5 ? SupportClass::dense_suspected : SupportClass::discrete;
    return out;
}

OutputRelation uniqueness_diagnostic(const AtomicMeasure& first, const AtomicMeasure& second,
                                     const MarginalChannel& channel, const OutputSchemes& schemes, double tol)
{
    if (first.dim() != second.dim()) throw ArgumentError("uniqueness diagnostic: measures have different dimensions");
    if (schemes.size() != channel.side_info_count())
        throw ArgumentError("uniqueness diagnostic: schemes do not match the channel's side information");
    if (!(tol >= 0.0)) throw ArgumentError("uniqueness diagnostic: tol must be >= 0");
    const OutputLaw a(first, channel, schemes);
    const OutputLaw b(second, channel, schemes);
    for (std::size_t v = 0; v < schemes.size(); ++v) {
        const auto qa = a.values(v);
        const auto qb = b.values(v);
        for (std::size_t k = 0; k < qa.size(); ++k) {
            const double scale = std::max({qa[k], qb[k], 1e-12});
            if (std::abs(qa[k] - qb[k]) > tol * scale) return OutputRelation::distinguishable;
        }
    }
    return OutputRelation::output_equivalent;
}

}  // namespace capax
