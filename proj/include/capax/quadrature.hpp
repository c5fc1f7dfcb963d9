#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "capax/channel.hpp"
#include "capax/measure.hpp"

namespace capax {

inline constexpr std::size_t kDefaultQuadraturePoints = 1025;
inline constexpr double kDefaultTailSigmas = 8.0;

/// Composite Simpson rule on a truncated interval of the output alphabet.
struct QuadratureScheme {
    std::vector<double> nodes;
    std::vector<double> weights;
    Interval span;

    std::size_t size() const noexcept { return nodes.size(); }
};

/// One scheme per side-information symbol v.
using OutputSchemes = std::vector<QuadratureScheme>;

/// Simpson nodes on [lo, hi]; `points` is the node count and must be odd and >= 17.
QuadratureScheme simpson_scheme(double lo, double hi, std::size_t points);

/// Scheme spanning every conditional density f_v(.|x) for x in `locations`,
/// each truncated at tail_sigmas standard deviations.
QuadratureScheme build_output_scheme(const MarginalChannel& channel, std::size_t v,
                                     std::span<const double> locations,
                                     double tail_sigmas = kDefaultTailSigmas,
                                     std::size_t points = kDefaultQuadraturePoints);

QuadratureScheme build_output_scheme(const MarginalChannel& channel, std::size_t v, const AtomicMeasure& measure,
                                     double tail_sigmas = kDefaultTailSigmas,
                                     std::size_t points = kDefaultQuadraturePoints);

OutputSchemes build_output_schemes(const MarginalChannel& channel, std::span<const double> locations,
                                   double tail_sigmas = kDefaultTailSigmas,
                                   std::size_t points = kDefaultQuadraturePoints);

/// Sum with fixed pairwise reduction order; results are reproducible bit for bit.
double pairwise_sum(std::span<const double> values);

/// Σ_k w_k f(y_k). Throws NumericError naming the first node where f is not finite.
double integrate(const std::function<double(double)>& f, const QuadratureScheme& scheme);

}  // namespace capax
