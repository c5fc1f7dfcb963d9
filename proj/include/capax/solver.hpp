#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capax/info.hpp"
#include "capax/kkt.hpp"
#include "capax/measure.hpp"
#include "capax/problem.hpp"

namespace capax {

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
};

struct SolverConfig {
    /// Starting atoms; defaults to `default_grid_count` points over the domain.
    std::optional<GridSpec> initial_grid;
    std::size_t default_grid_count = 21;
    double kkt_tol = kDefaultKktTol;
    double weight_tol = kDefaultWeightFloor;
    double merge_radius = kDefaultMergeRadius;
    int max_outer_iters = 60;
    int max_ba_iters = 20000;
    /// Weight iterations stop once max_j φ_j - Σ p_j φ_j falls below this (bits).
    double ba_tol = 1e-6;
    /// Multipliers are searched in [0, gamma_max].
    double gamma_max = 100.0;
    /// Largest move of one atom in one location step.
    double location_step = 0.5;
    int location_iters = 8;
    /// Weight given to an atom inserted at a KKT violation.
    double insert_weight = 1e-3;
    /// 0 keeps the initial grid exact; any other value jitters its interior points.
    std::uint64_t seed = 0;
    double tail_sigmas = kDefaultTailSigmas;
    std::size_t quadrature_points = kDefaultQuadraturePoints;
    std::size_t verify_points = kDefaultVerifyPoints;

    /// Throws ArgumentError on a value outside its documented range.
    void validate() const;
};

struct TraceEntry {
    int iteration = 0;
    double lagrangian_bits = 0.0;
    double max_residual = 0.0;
    std::size_t atoms = 0;
};

struct CapacitySolution {
    AtomicMeasure measure = AtomicMeasure::dirac(0.0);
    double capacity_bits = 0.0;
    std::vector<double> multipliers;
    KktReport kkt;
    SupportReport support;
    std::vector<TraceEntry> trace;
    bool certified = false;
    int iterations = 0;
};

/// The quadrature schemes a solve uses throughout: every conditional density
/// over the whole domain is covered, so all evaluations share one rule.
OutputSchemes problem_schemes(const Problem& problem, const SolverConfig& config);

/// f(P) = I(P) - Σ γ_i (∫ g_i dP - Γ_i), in bits.
double lagrangian(const AtomicMeasure& measure, const Problem& problem, std::span<const double> gamma,
                  const OutputSchemes& schemes);

/// One fixed-point pass on the weights of a fixed support:
///   p'_j ∝ p_j 2^(i(x_j) - Σ γ_i g_i(x_j)).
/// Throws DegenerateMeasureError when every exponent is -infinity.
AtomicMeasure ba_weight_update(const AtomicMeasure& measure, const Problem& problem, std::span<const double> gamma,
                               const OutputSchemes& schemes);

struct MultiplierResult {
    std::vector<double> gamma;
    AtomicMeasure measure = AtomicMeasure::dirac(0.0);
    int ba_iterations = 0;
};

/// Finds γ >= 0 and the weights maximizing the Lagrangian on the support of
/// `start` such that every constraint is either inactive (γ_i = 0, moment
/// <= Γ_i) or met with equality. One constraint at a time is bracketed and
/// solved; several constraints are cycled until slackness holds jointly.
/// Throws SolverError when a constraint cannot be met within [0, gamma_max].
MultiplierResult multiplier_search(const AtomicMeasure& start, const Problem& problem, const SolverConfig& config,
                                   const OutputSchemes& schemes, std::span<const double> warm_gamma = {});

/// ∂f/∂x_j = p_j d/dx [i(x) - Σ γ_i g_i(x)] at x_j, output law held fixed.
std::vector<double> location_gradient(const AtomicMeasure& measure, std::size_t j, const Problem& problem,
                                      std::span<const double> gamma, const OutputSchemes& schemes);

/// Inserts an atom (and its mirror image when `mirrored`) at the largest
/// KKT violation of `scan` if it exceeds kkt_tol, then prunes.
AtomicMeasure refine_support(const AtomicMeasure& measure, const RhoScan& scan, const SolverConfig& config,
                             bool mirrored = false);

/// Whether the problem is invariant under x -> -x.
bool reflection_symmetric(const Problem& problem);

CapacitySolution solve(const Problem& problem, const SolverConfig& config = {});

/// Gateaux differential of the Lagrangian at `base` toward `direction`:
///   ∫ φ dP - ∫ φ dP_o  with φ(x) = i_{P_o}(x) - Σ γ_i g_i(x).
double gateaux(const AtomicMeasure& base, const AtomicMeasure& direction, const Problem& problem,
               std::span<const double> gamma, const OutputSchemes& schemes);

}  // namespace capax
