#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capax/info.hpp"
#include "capax/measure.hpp"
#include "capax/problem.hpp"

namespace capax {

inline constexpr double kDefaultKktTol = 1e-4;
inline constexpr double kSlacknessTol = 1e-6;
inline constexpr std::size_t kDefaultVerifyPoints = 2001;

/// Kuhn-Tucker residual of a candidate optimum:
///   rho(x) = i(x) - Σ γ_i g_i(x) - (C - Σ γ_i Γ_i)
/// where i(x) is the information density against the candidate's output law.
/// At the capacity-achieving law rho <= 0 everywhere with equality on the support.
double rho(double x, const OutputLaw& law, const ConstraintSpec& constraints, std::span<const double> gamma,
           double capacity_bits);

double rho(double x, const AtomicMeasure& optimum, std::span<const double> gamma, double capacity_bits,
           const MarginalChannel& channel, const ConstraintSpec& constraints, const OutputSchemes& schemes);

/// rho evaluated on the verification points.
struct RhoScan {
    std::vector<double> x;
    std::vector<double> rho;
    std::vector<bool> on_support;
    /// Number of leading entries that belong to the uniform grid (or the finite alphabet).
    std::size_t grid_count = 0;
};

struct KktReport {
    /// max rho over verification points that are not atoms (bits).
    double max_off_support_violation = 0.0;
    /// max |rho| over the atoms (bits).
    double max_on_support_residual = 0.0;
    /// γ_i (∫ g_i dP - Γ_i) per constraint.
    std::vector<double> slackness_residuals;
    Interval grid;
    std::size_t grid_count = 0;
    bool feasible = true;
    bool certified = false;
    double kkt_tol = kDefaultKktTol;
    /// The C the residual was measured against.
    double capacity_bits = 0.0;
    /// Where max_off_support_violation was attained.
    double worst_location = 0.0;
};

struct VerifyOptions {
    double kkt_tol = kDefaultKktTol;
    std::size_t grid_points = kDefaultVerifyPoints;
    /// Uniform grid extent; defaults to the problem's (interval) domain.
    std::optional<Interval> grid;
};

struct Verification {
    KktReport report;
    RhoScan scan;
};

/// Evaluates rho on a uniform grid plus the atoms and the midpoints between
/// adjacent atoms (finite domains: on every alphabet point plus the atoms).
/// certified = feasible ∧ off-support max <= tol ∧ on-support max <= tol ∧ |slackness| <= 1e-6.
///
/// Throws ArgumentError when the grid does not cover every atom or has fewer
/// than 10 points per atom.
Verification verify(const AtomicMeasure& optimum, std::span<const double> gamma, double capacity_bits,
                    const Problem& problem, const OutputSchemes& schemes, const VerifyOptions& options = {});

enum class SupportClass { discrete, dense_suspected };

std::string to_string(SupportClass c);

struct SupportReport {
    std::size_t atom_count = 0;
    /// Smallest distance between two atoms; +infinity for a single atom.
    double min_separation = 0.0;
    SupportClass classification = SupportClass::discrete;
    /// Fraction of off-support grid points with |rho| < kkt_tol.
    double near_zero_rho_fraction = 0.0;
};

/// dense_suspected iff more than half of the off-support grid has |rho| < kkt_tol.
/// A reporting heuristic; it carries no optimality claim.
SupportReport support_report(const AtomicMeasure& optimum, const Verification& verification);

enum class OutputRelation { distinguishable, output_equivalent };

/// Compares the output laws of two input measures node by node on every
/// scheme: equivalent iff |q1 - q2| <= tol · max(q1, q2, 1e-12) everywhere.
OutputRelation uniqueness_diagnostic(const AtomicMeasure& first, const AtomicMeasure& second,
                                     const MarginalChannel& channel, const OutputSchemes& schemes, double tol);

}  // namespace capax
