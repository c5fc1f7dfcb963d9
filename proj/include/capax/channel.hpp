#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace capax {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Finite (or externally discretized) law of the channel state S.
struct StateModel {
    std::vector<double> values;
    std::vector<double> weights;

    /// Throws ConfigError when empty, mismatched, negative, or not summing to one.
    void validate() const;
    std::size_t size() const noexcept { return values.size(); }

    static StateModel point(double value);
};

/// Receiver side information: symbols v with probabilities R(v) and the
/// conditional state law Q_v attached to each.
struct SideInfoModel {
    std::vector<double> r_weights;
    std::vector<StateModel> q_given_v;
    std::vector<std::string> labels;

    void validate() const;
    std::size_t size() const noexcept { return r_weights.size(); }
};

enum class SideInfoKind { none, full, quantized };

/// Builds the side-information model for a state law.
///
/// none       one symbol, Q_v is the state law itself
/// full       one symbol per state node, Q_v a point mass
/// quantized  the value-sorted state nodes split into `bins` contiguous cells
///            of (near) equal node count; Q_v is the law conditioned on a cell
///
/// A quantized partition with an empty cell (bins > state count) is a ConfigError.
SideInfoModel make_side_info(SideInfoKind kind, const StateModel& state, std::size_t bins = 1);

/// Conditional output density of W(.|x,s) with respect to Lebesgue measure on R.
class ChannelKernel {
public:
    virtual ~ChannelKernel() = default;

    virtual double density(double y, double x, double s) const = 0;

    /// Whether density_dx is implemented analytically.
    virtual bool has_density_dx() const { return false; }
    /// d/dx density(y|x,s). Only called when has_density_dx() is true.
    virtual double density_dx(double y, double x, double s) const;

    /// Interval carrying all but a negligible tail of density(.|x,s).
    virtual Interval span(double x, double s, double tail_sigmas) const = 0;

    /// density(y|x,s) == density(-y|-x,s) for every y, x, s.
    virtual bool reflection_symmetric() const { return false; }

    virtual std::string name() const = 0;
};

double gaussian_pdf(double y, double mean, double variance);

/// y = x + N(0, noise_std^2); the state is ignored.
class AwgnKernel final : public ChannelKernel {
public:
    explicit AwgnKernel(double noise_std);
    double density(double y, double x, double s) const override;
    bool has_density_dx() const override { return true; }
    double density_dx(double y, double x, double s) const override;
    Interval span(double x, double s, double tail_sigmas) const override;
    bool reflection_symmetric() const override { return true; }
    std::string name() const override { return "awgn"; }
    double noise_std() const noexcept { return noise_std_; }

private:
    double noise_std_;
};

/// y = s x + N(0, noise_std^2) with real fading gain s.
class FadingKernel final : public ChannelKernel {
public:
    explicit FadingKernel(double noise_std);
    double density(double y, double x, double s) const override;
    bool has_density_dx() const override { return true; }
    double density_dx(double y, double x, double s) const override;
    Interval span(double x, double s, double tail_sigmas) const override;
    bool reflection_symmetric() const override { return true; }
    std::string name() const override { return "fading"; }
    double noise_std() const noexcept { return noise_std_; }

private:
    double noise_std_;
};

/// Real surrogate of a noncoherent Rayleigh channel: y ~ N(0, noise^2 + x^2 fade^2).
class RayleighSurrogateKernel final : public ChannelKernel {
public:
    RayleighSurrogateKernel(double fade_std, double noise_std);
    double density(double y, double x, double s) const override;
    bool has_density_dx() const override { return true; }
    double density_dx(double y, double x, double s) const override;
    Interval span(double x, double s, double tail_sigmas) const override;
    bool reflection_symmetric() const override { return true; }
    std::string name() const override { return "rayleigh_surrogate"; }
    double variance(double x) const noexcept;

private:
    double fade_std_;
    double noise_std_;
};

/// Effective channel f_v(y|x) = Σ_s Q_v(s) density(y|x,s).
class MarginalChannel {
public:
    MarginalChannel(std::shared_ptr<const ChannelKernel> kernel, SideInfoModel side_info);

    std::size_t side_info_count() const noexcept { return side_info_.size(); }
    double r(std::size_t v) const { return side_info_.r_weights[v]; }
    const SideInfoModel& side_info() const noexcept { return side_info_; }
    const ChannelKernel& kernel() const noexcept { return *kernel_; }
    std::shared_ptr<const ChannelKernel> kernel_ptr() const noexcept { return kernel_; }

    double density(double y, double x, std::size_t v) const;
    /// d/dx f_v(y|x); analytic when the kernel provides it, else a central difference.
    double density_dx(double y, double x, std::size_t v) const;
    bool has_analytic_dx() const { return kernel_->has_density_dx(); }

    /// Union of the kernel spans over the states carried by Q_v.
    Interval span(double x, std::size_t v, double tail_sigmas) const;

    bool reflection_symmetric() const { return kernel_->reflection_symmetric(); }

private:
    std::shared_ptr<const ChannelKernel> kernel_;
    SideInfoModel side_info_;
    // Per v: the (state, weight) pairs with nonzero weight.
    std::vector<std::vector<std::pair<double, double>>> active_states_;
};

/// Throws ConfigError for empty or invalid state / side-information laws.
MarginalChannel marginalize(std::shared_ptr<const ChannelKernel> kernel, SideInfoModel side_info);

struct KernelWithState {
    std::shared_ptr<const ChannelKernel> kernel;
    StateModel state;
};

/// AWGN kernel together with a trivial single-point state law.
KernelWithState make_awgn(double noise_std);
KernelWithState make_finite_state_fading(std::vector<double> gains, std::vector<double> probs, double noise_std);
KernelWithState make_rayleigh_surrogate(double fade_std, double noise_std);

}  // namespace capax
