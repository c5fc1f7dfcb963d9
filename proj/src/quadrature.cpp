#include "capax/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "capax/errors.hpp"

namespace capax {

QuadratureScheme simpson_scheme(double lo, double hi, std::size_t points)
{
    if (points < 17 || points % 2 == 0)
        throw ArgumentError("quadrature: node count must be odd and >= 17, got " + std::to_string(points));
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("quadrature: non-finite span");
    if (!(hi > lo)) throw ConfigError("quadrature: empty span");

    QuadratureScheme s;
    s.span = {lo, hi};
    s.nodes.resize(points);
    s.weights.resize(points);
    const std::size_t intervals = points - 1;
    const double h = (hi - lo) / static_cast<double>(intervals);
    for (std::size_t k = 0; k < points; ++k) {
        // Fill symmetric spans from both ends so y_k == -y_{n-1-k} exactly.
        s.nodes[k] = k <= intervals / 2 ? lo + h * static_cast<double>(k)
                                        : hi - h * static_cast<double>(intervals - k);
        const double c = (k == 0 || k == intervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        s.weights[k] = c * h / 3.0;
    }
    return s;
}

QuadratureScheme build_output_scheme(const MarginalChannel& channel, std::size_t v,
                                     std::span<const double> locations, double tail_sigmas, std::size_t points)
{
    if (!(tail_sigmas >= 4.0)) throw ArgumentError("quadrature: tail_sigmas must be >= 4");
    if (locations.empty()) throw ArgumentError("quadrature: no input locations to cover");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : locations) {
        const Interval part = channel.span(x, v, tail_sigmas);
        lo = std::min(lo, part.lo);
        hi = std::max(hi, part.hi);
    }
    return simpson_scheme(lo, hi, points);
}

QuadratureScheme build_output_scheme(const MarginalChannel& channel, std::size_t v, const AtomicMeasure& measure,
                                     double tail_sigmas, std::size_t points)
{
    const auto locs = measure.locations();
    return build_output_scheme(channel, v, locs, tail_sigmas, points);
}

OutputSchemes build_output_schemes(const MarginalChannel& channel, std::span<const double> locations,
                                   double tail_sigmas, std::size_t points)
{
    OutputSchemes out;
    out.reserve(channel.side_info_count());
    for (std::size_t v = 0; v < channel.side_info_count(); ++v)
        out.push_back(build_output_scheme(channel, v, locations, tail_sigmas, points));
    return out;
}

double pairwise_sum(std::span<const double> values)
{
    if (values.size() <= 16) {
        double acc = 0.0;
        for (double x : values) acc += x;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double integrate(const std::function<double(double)>& f, const QuadratureScheme& scheme)
{
    std::vector<double> terms(scheme.size());
    for (std::size_t k = 0; k < scheme.size(); ++k) {
        const double fy = f(scheme.nodes[k]);
        if (!std::isfinite(fy)) {
            std::ostringstream msg;
            msg << "quadrature: integrand is " << fy << " at node " << k << " (y = " << scheme.nodes[k] << ")";
            throw NumericError(msg.str());
        }
        terms[k] = scheme.weights[k] * fy;
    }
    return pairwise_sum(terms);
}

}  // namespace capax
