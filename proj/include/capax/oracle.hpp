#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "capax/channel.hpp"
#include "capax/measure.hpp"
#include "capax/problem.hpp"
#include "capax/quadrature.hpp"

namespace capax {

/// Discrete memoryless channel given by a row-stochastic transition matrix.
class FiniteChannel {
public:
    /// Throws ArgumentError unless every row is nonnegative, of equal length
    /// and sums to one within 1e-12.
    explicit FiniteChannel(std::vector<std::vector<double>> matrix);

    std::size_t inputs() const noexcept { return matrix_.size(); }
    std::size_t outputs() const noexcept { return matrix_.empty() ? 0 : matrix_.front().size(); }
    double operator()(std::size_t x, std::size_t y) const { return matrix_[x][y]; }
    const std::vector<std::vector<double>>& matrix() const noexcept { return matrix_; }

private:
    std::vector<std::vector<double>> matrix_;
};

struct FiniteCapacity {
    double bits = 0.0;
    std::vector<double> input;
    /// max_x D(W(.|x) || q) at the returned input; capacity lies in [bits, upper_bits].
    double upper_bits = 0.0;
    int iterations = 0;
};

/// Alternating maximization over the input law, stopped once the duality gap
/// upper_bits - bits drops below `tol` or after `iters` passes.
FiniteCapacity classic_capacity_iteration(const FiniteChannel& channel, int iters = 100000, double tol = 1e-12);

/// ½ log2(1 + snr). Throws ArgumentError unless snr > 0.
double awgn_closed_form(double snr);

/// A finite channel rewritten as a continuous one: input i sits at x = i and
/// output j becomes a narrow Gaussian bump centred at y = j.
class EmbeddedFiniteKernel final : public ChannelKernel {
public:
    explicit EmbeddedFiniteKernel(FiniteChannel channel);

    /// Density of the input point nearest to x.
    double density(double y, double x, double s) const override;
    Interval span(double x, double s, double tail_sigmas) const override;
    std::string name() const override { return "finite_embedding"; }

    const FiniteChannel& channel() const noexcept { return channel_; }
    double bump_std() const noexcept { return bump_std_; }

private:
    std::size_t nearest_input(double x) const;

    FiniteChannel channel_;
    double bump_std_;
};

struct EmbeddedChannel {
    std::shared_ptr<const EmbeddedFiniteKernel> kernel;
    StateModel state;
    std::vector<double> inputs;
};

/// Embeds with bump width 1e-2 times the output spacing.
EmbeddedChannel embed_finite_channel(const FiniteChannel& channel);

/// An unconstrained problem over the embedded channel's input points.
Problem embedded_problem(const EmbeddedChannel& embedded);

struct SmallSupportResult {
    AtomicMeasure measure = AtomicMeasure::dirac(0.0);
    double bits = 0.0;
    std::size_t candidates = 0;
};

/// Brute force over every support of at most `k_max` grid points and every
/// weight vector on the 0.05 lattice of the simplex, keeping feasible ones.
///
/// Throws ArgumentError when k_max is not in [1, 3] or the grid holds more
/// than 41 points, OracleError when no candidate is feasible.
SmallSupportResult exhaustive_small_support(const Problem& problem, std::size_t k_max, std::span<const double> grid,
                                            const OutputSchemes& schemes);

}  // namespace capax
