#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "capax/channel.hpp"
#include "capax/measure.hpp"
#include "capax/quadrature.hpp"

namespace capax {

inline constexpr double kLn2 = std::numbers::ln2;

/// An information quantity in bits. `finite` is false only when absolute
/// continuity failed, in which case `bits` is +infinity.
struct InfoValue {
    double bits = 0.0;
    bool finite = true;
};

/// Σ p_i log2(p_i / q_i) with 0 log 0 = 0; infinite iff some p_i > 0 has q_i = 0.
InfoValue relative_entropy_discrete(std::span<const double> p, std::span<const double> q);

/// Output density q_v(y) = Σ_j p_j f_v(y|x_j) of a fixed input law.
class OutputDensity {
public:
    OutputDensity(const AtomicMeasure& measure, const MarginalChannel& channel, std::size_t v);
    double operator()(double y) const;

private:
    const MarginalChannel* channel_;
    std::size_t v_;
    std::vector<double> locations_;
    std::vector<double> weights_;
};

OutputDensity output_density(const AtomicMeasure& measure, const MarginalChannel& channel, std::size_t v);

/// The output law of a fixed input measure tabulated on quadrature nodes,
/// one table per side-information symbol. Every per-input functional
/// (divergence, information density and its x-derivative) is evaluated
/// against these tables.
class OutputLaw {
public:
    OutputLaw(const AtomicMeasure& measure, const MarginalChannel& channel, const OutputSchemes& schemes);

    const MarginalChannel& channel() const noexcept { return *channel_; }
    const OutputSchemes& schemes() const noexcept { return *schemes_; }
    std::span<const double> values(std::size_t v) const { return q_[v]; }

    /// D(f_v(.|x) || q_v) in nats; +infinity signals an absolute-continuity failure.
    double divergence_nats(double x, std::size_t v) const;
    /// ∫ f_v(.|x) |log(f_v/q_v)| in nats.
    double abs_divergence_nats(double x, std::size_t v) const;
    /// Σ_v R(v) D(f_v(.|x) || q_v) in bits.
    double information_density(double x) const;
    /// Σ_v R(v) ∫ ∂f_v/∂x log2(f_v/q_v): the gradient of I with respect to an
    /// atom location, per unit atom weight. The terms through q_v cancel.
    double information_density_dx(double x) const;

private:
    const MarginalChannel* channel_;
    const OutputSchemes* schemes_;
    std::vector<std::vector<double>> q_;
    std::vector<std::vector<double>> log_q_;
};

/// D(W_{Q_v}(.|x) || P W_{Q_v}) in bits by quadrature on `scheme`.
double divergence_at(double x, const AtomicMeasure& measure, const MarginalChannel& channel, std::size_t v,
                     const QuadratureScheme& scheme);

/// Σ_v R(v) divergence_at(x, ., v).
double information_density(double x, const AtomicMeasure& measure, const MarginalChannel& channel,
                           const OutputSchemes& schemes);

/// I(P, W_{Q_v} | R) = Σ_j p_j information_density(x_j), in bits.
InfoValue mutual_information(const AtomicMeasure& measure, const MarginalChannel& channel,
                             const OutputSchemes& schemes);

/// Same triple integral as mutual_information with |log2(.)| inside.
double abs_mutual_information(const AtomicMeasure& measure, const MarginalChannel& channel,
                              const OutputSchemes& schemes);

/// Default schemes covering the atoms of `measure` plus any extra locations.
OutputSchemes schemes_for(const MarginalChannel& channel, const AtomicMeasure& measure,
                          std::span<const double> extra_locations = {},
                          double tail_sigmas = kDefaultTailSigmas, std::size_t points = kDefaultQuadraturePoints);

}  // namespace capax
