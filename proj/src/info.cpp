#include "capax/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "capax/errors.hpp"

namespace capax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// q below this floor is clamped before taking the log ...
constexpr double kDensityFloor = 1e-300;
// ... and counts as zero (infinite divergence) when f is above kSignalDensity.
constexpr double kZeroDensity = 1e-250;
constexpr double kSignalDensity = 1e-12;

}  // namespace

InfoValue relative_entropy_discrete(std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size())
        throw ArgumentError("relative entropy: " + std::to_string(p.size()) + " vs " + std::to_string(q.size()) +
                            " probabilities");
    std::vector<double> terms;
    terms.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return {kInf, false};
        terms.push_back(p[i] * std::log2(p[i] / q[i]));
    }
    return {pairwise_sum(terms), true};
}

OutputDensity::OutputDensity(const AtomicMeasure& measure, const MarginalChannel& channel, std::size_t v)
    : channel_(&channel), v_(v), locations_(measure.locations()),
      weights_(measure.weights().begin(), measure.weights().end())
{
    if (v >= channel.side_info_count()) throw ArgumentError("output density: side-information index out of range");
}

double OutputDensity::operator()(double y) const
{
    double acc = 0.0;
    for (std::size_t j = 0; j < locations_.size(); ++j) acc += weights_[j] * channel_->density(y, locations_[j], v_);
    return acc;
}

OutputDensity output_density(const AtomicMeasure& measure, const MarginalChannel& channel, std::size_t v)
{
    return OutputDensity(measure, channel, v);
}

OutputLaw::OutputLaw(const AtomicMeasure& measure, const MarginalChannel& channel, const OutputSchemes& schemes)
    : channel_(&channel), schemes_(&schemes)
{
    if (schemes.size() != channel.side_info_count())
        throw ArgumentError("output law: need one quadrature scheme per side-information symbol");
    q_.resize(schemes.size());
    log_q_.resize(schemes.size());
    for (std::size_t v = 0; v < schemes.size(); ++v) {
        const auto& nodes = schemes[v].nodes;
        auto& q = q_[v];
        q.assign(nodes.size(), 0.0);
        for (std::size_t j = 0; j < measure.size(); ++j) {
            const double p = measure.weight(j);
            if (p <= 0.0) continue;
            const double x = measure.x(j);
            for (std::size_t k = 0; k < nodes.size(); ++k) q[k] += p * channel.density(nodes[k], x, v);
        }
        auto& lq = log_q_[v];
        lq.resize(nodes.size());
        for (std::size_t k = 0; k < nodes.size(); ++k) lq[k] = std::log(std::max(q[k], kDensityFloor));
    }
}

double OutputLaw::divergence_nats(double x, std::size_t v) const
{
    const auto& scheme = (*schemes_)[v];
    const auto& q = q_[v];
    const auto& lq = log_q_[v];
    std::vector<double> terms(scheme.size(), 0.0);
    for (std::size_t k = 0; k < scheme.size(); ++k) {
        const double f = channel_->density(scheme.nodes[k], x, v);
        if (f <= 0.0) continue;
        if (q[k] < kZeroDensity && f > kSignalDensity) return kInf;
        terms[k] = scheme.weights[k] * f * (std::log(f) - lq[k]);
    }
    return pairwise_sum(terms);
}

double OutputLaw::abs_divergence_nats(double x, std::size_t v) const
{
    const auto& scheme = (*schemes_)[v];
    const auto& q = q_[v];
    const auto& lq = log_q_[v];
    std::vector<double> terms(scheme.size(), 0.0);
    for (std::size_t k = 0; k < scheme.size(); ++k) {
        const double f = channel_->density(scheme.nodes[k], x, v);
        if (f <= 0.0) continue;
        if (q[k] < kZeroDensity && f > kSignalDensity) return kInf;
        terms[k] = scheme.weights[k] * f * std::abs(std::log(f) - lq[k]);
    }
    return pairwise_sum(terms);
}

double OutputLaw::information_density(double x) const
{
    double acc = 0.0;
    for (std::size_t v = 0; v < q_.size(); ++v) {
        const double r = channel_->r(v);
        if (r <= 0.0) continue;
        const double d = divergence_nats(x, v);
        if (!std::isfinite(d)) return kInf;
        acc += r * d;
    }
    return acc / kLn2;
}

double OutputLaw::information_density_dx(double x) const
{
    double acc = 0.0;
    for (std::size_t v = 0; v < q_.size(); ++v) {
        const double r = channel_->r(v);
        if (r <= 0.0) continue;
        const auto& scheme = (*schemes_)[v];
        const auto& lq = log_q_[v];
        std::vector<double> terms(scheme.size(), 0.0);
        for (std::size_t k = 0; k < scheme.size(); ++k) {
            const double f = channel_->density(scheme.nodes[k], x, v);
            if (f <= 0.0) continue;
            terms[k] = scheme.weights[k] * channel_->density_dx(scheme.nodes[k], x, v) * (std::log(f) - lq[k]);
        }
        acc += r * pairwise_sum(terms);
    }
    if (!std::isfinite(acc)) throw NumericError("information density derivative is not finite at x = " + std::to_string(x));
    return acc / kLn2;
}

double divergence_at(double x, const AtomicMeasure& measure, const MarginalChannel& channel, std::size_t v,
                     const QuadratureScheme& scheme)
{
    if (v >= channel.side_info_count()) throw ArgumentError("divergence: side-information index out of range");
    // Only symbol v is needed; the remaining tables are filled from the same scheme.
    OutputSchemes schemes(channel.side_info_count(), scheme);
    OutputLaw law(measure, channel, schemes);
    return law.divergence_nats(x, v) / kLn2;
}

double information_density(double x, const AtomicMeasure& measure, const MarginalChannel& channel,
                           const OutputSchemes& schemes)
{
    return OutputLaw(measure, channel, schemes).information_density(x);
}

InfoValue mutual_information(const AtomicMeasure& measure, const MarginalChannel& channel, const OutputSchemes& schemes)
{
    const OutputLaw law(measure, channel, schemes);
    std::vector<double> terms;
    terms.reserve(measure.size());
    for (std::size_t j = 0; j < measure.size(); ++j) {
        if (measure.weight(j) <= 0.0) continue;
        const double i = law.information_density(measure.x(j));
        if (!std::isfinite(i)) return {kInf, false};
        terms.push_back(measure.weight(j) * i);
    }
    return {pairwise_sum(terms), true};
}

double abs_mutual_information(const AtomicMeasure& measure, const MarginalChannel& channel,
                              const OutputSchemes& schemes)
{
    const OutputLaw law(measure, channel, schemes);
    std::vector<double> terms;
    for (std::size_t j = 0; j < measure.size(); ++j) {
        if (measure.weight(j) <= 0.0) continue;
        double acc = 0.0;
        for (std::size_t v = 0; v < channel.side_info_count(); ++v) {
            if (channel.r(v) <= 0.0) continue;
            const double d = law.abs_divergence_nats(measure.x(j), v);
            if (!std::isfinite(d)) return d;
            acc += channel.r(v) * d;
        }
        terms.push_back(measure.weight(j) * acc / kLn2);
    }
    return pairwise_sum(terms);
}

OutputSchemes schemes_for(const MarginalChannel& channel, const AtomicMeasure& measure,
                          std::span<const double> extra_locations, double tail_sigmas, std::size_t points)
{
    std::vector<double> locs = measure.locations();
    locs.insert(locs.end(), extra_locations.begin(), extra_locations.end());
    return build_output_schemes(channel, locs, tail_sigmas, points);
}

}  // namespace capax
