#include "capax/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "capax/errors.hpp"

namespace capax {

namespace {

void check_distribution(const std::vector<double>& w, const char* what)
{
    if (w.empty()) throw ConfigError(std::string(what) + ": empty support");
    double total = 0.0;
    for (double x : w) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError(std::string(what) + ": weights must be finite and >= 0");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ConfigError(std::string(what) + ": weights sum to " + std::to_string(total) + ", expected 1");
}

void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError(std::string(what) + " must be a finite value > 0");
}

}  // namespace

void StateModel::validate() const
{
    if (values.size() != weights.size())
        throw ConfigError("state model: " + std::to_string(values.size()) + " values but " +
                          std::to_string(weights.size()) + " weights");
    check_distribution(weights, "state model");
    for (double v : values)
        if (!std::isfinite(v)) throw ConfigError("state model: values must be finite");
}

StateModel StateModel::point(double value)
{
    return {{value}, {1.0}};
}

void SideInfoModel::validate() const
{
    if (r_weights.size() != q_given_v.size())
        throw ConfigError("side information: R and Q_v sizes differ");
    check_distribution(r_weights, "side information");
    for (const auto& q : q_given_v) q.validate();
}

SideInfoModel make_side_info(SideInfoKind kind, const StateModel& state, std::size_t bins)
{
    state.validate();
    SideInfoModel out;
    switch (kind) {
    case SideInfoKind::none:
        out.r_weights = {1.0};
        out.q_given_v = {state};
        out.labels = {"none"};
        break;
    case SideInfoKind::full:
        for (std::size_t i = 0; i < state.size(); ++i) {
            out.r_weights.push_back(state.weights[i]);
            out.q_given_v.push_back(StateModel::point(state.values[i]));
            out.labels.push_back("s=" + std::to_string(state.values[i]));
        }
        break;
    case SideInfoKind::quantized: {
        if (bins < 1) throw ConfigError("side information: quantized needs bins >= 1");
        const std::size_t n = state.size();
        if (bins > n)
            throw ConfigError("side information: " + std::to_string(bins) + " bins over " + std::to_string(n) +
                              " state nodes leaves an empty cell");
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return state.values[a] < state.values[b]; });
        std::size_t start = 0;
        for (std::size_t b = 0; b < bins; ++b) {
            const std::size_t count = n / bins + (b < n % bins ? 1 : 0);
            StateModel cell;
            double mass = 0.0;
            for (std::size_t k = start; k < start + count; ++k) mass += state.weights[order[k]];
            if (!(mass > 0.0)) throw ConfigError("side information: quantization cell " + std::to_string(b) + " has no mass");
            for (std::size_t k = start; k < start + count; ++k) {
                cell.values.push_back(state.values[order[k]]);
                cell.weights.push_back(state.weights[order[k]] / mass);
            }
            out.r_weights.push_back(mass);
            out.q_given_v.push_back(std::move(cell));
            out.labels.push_back("cell" + std::to_string(b));
            start += count;
        }
        break;
    }
    }
    return out;
}

double ChannelKernel::density_dx(double, double, double) const
{
    throw NumericError("channel kernel " + name() + " has no analytic x-derivative");
}

double gaussian_pdf(double y, double mean, double variance)
{
    const double d = y - mean;
    return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

AwgnKernel::AwgnKernel(double noise_std) : noise_std_(noise_std)
{
    require_positive(noise_std, "awgn: noise_std");
}

double AwgnKernel::density(double y, double x, double) const
{
    return gaussian_pdf(y, x, noise_std_ * noise_std_);
}

double AwgnKernel::density_dx(double y, double x, double) const
{
    const double var = noise_std_ * noise_std_;
    return gaussian_pdf(y, x, var) * (y - x) / var;
}

Interval AwgnKernel::span(double x, double, double tail_sigmas) const
{
    return {x - tail_sigmas * noise_std_, x + tail_sigmas * noise_std_};
}

FadingKernel::FadingKernel(double noise_std) : noise_std_(noise_std)
{
    require_positive(noise_std, "fading: noise_std");
}

double FadingKernel::density(double y, double x, double s) const
{
    return gaussian_pdf(y, s * x, noise_std_ * noise_std_);
}

double FadingKernel::density_dx(double y, double x, double s) const
{
    const double var = noise_std_ * noise_std_;
    return gaussian_pdf(y, s * x, var) * (y - s * x) * s / var;
}

Interval FadingKernel::span(double x, double s, double tail_sigmas) const
{
    return {s * x - tail_sigmas * noise_std_, s * x + tail_sigmas * noise_std_};
}

RayleighSurrogateKernel::RayleighSurrogateKernel(double fade_std, double noise_std)
    : fade_std_(fade_std), noise_std_(noise_std)
{
    require_positive(fade_std, "rayleigh_surrogate: fade_std");
    require_positive(noise_std, "rayleigh_surrogate: noise_std");
}

double RayleighSurrogateKernel::variance(double x) const noexcept
{
    return noise_std_ * noise_std_ + x * x * fade_std_ * fade_std_;
}

double RayleighSurrogateKernel::density(double y, double x, double) const
{
    return gaussian_pdf(y, 0.0, variance(x));
}

double RayleighSurrogateKernel::density_dx(double y, double x, double) const
{
    const double v = variance(x);
    const double dv_dx = 2.0 * x * fade_std_ * fade_std_;
    return gaussian_pdf(y, 0.0, v) * 0.5 * (y * y / v - 1.0) / v * dv_dx;
}

Interval RayleighSurrogateKernel::span(double x, double, double tail_sigmas) const
{
    const double sd = std::sqrt(variance(x));
    return {-tail_sigmas * sd, tail_sigmas * sd};
}

MarginalChannel::MarginalChannel(std::shared_ptr<const ChannelKernel> kernel, SideInfoModel side_info)
    : kernel_(std::move(kernel)), side_info_(std::move(side_info))
{
    if (!kernel_) throw ConfigError("marginal channel: missing kernel");
    side_info_.validate();
    active_states_.resize(side_info_.size());
    for (std::size_t v = 0; v < side_info_.size(); ++v) {
        const auto& q = side_info_.q_given_v[v];
        for (std::size_t i = 0; i < q.size(); ++i)
            if (q.weights[i] > 0.0) active_states_[v].emplace_back(q.values[i], q.weights[i]);
    }
    if (side_info_.labels.size() != side_info_.size()) {
        side_info_.labels.clear();
        for (std::size_t v = 0; v < side_info_.size(); ++v) side_info_.labels.push_back("v" + std::to_string(v));
    }
}

double MarginalChannel::density(double y, double x, std::size_t v) const
{
    double acc = 0.0;
    for (const auto& [s, w] : active_states_[v]) acc += w * kernel_->density(y, x, s);
    return acc;
}

double MarginalChannel::density_dx(double y, double x, std::size_t v) const
{
    if (kernel_->has_density_dx()) {
        double acc = 0.0;
        for (const auto& [s, w] : active_states_[v]) acc += w * kernel_->density_dx(y, x, s);
        return acc;
    }
    const double h = 1e-4 * (1.0 + std::abs(x));
    return (density(y, x + h, v) - density(y, x - h, v)) / (2.0 * h);
}

Interval MarginalChannel::span(double x, std::size_t v, double tail_sigmas) const
{
    Interval out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& [s, w] : active_states_[v]) {
        const Interval part = kernel_->span(x, s, tail_sigmas);
        out.lo = std::min(out.lo, part.lo);
        out.hi = std::max(out.hi, part.hi);
    }
    return out;
}

MarginalChannel marginalize(std::shared_ptr<const ChannelKernel> kernel, SideInfoModel side_info)
{
    return MarginalChannel(std::move(kernel), std::move(side_info));
}

KernelWithState make_awgn(double noise_std)
{
    return {std::make_shared<AwgnKernel>(noise_std), StateModel::point(1.0)};
}

KernelWithState make_finite_state_fading(std::vector<double> gains, std::vector<double> probs, double noise_std)
{
    if (gains.size() != probs.size())
        throw ArgumentError("fading: " + std::to_string(gains.size()) + " gains but " + std::to_string(probs.size()) +
                            " probabilities");
    StateModel state{std::move(gains), std::move(probs)};
    try {
        state.validate();
    } catch (const ConfigError& e) {
        throw ArgumentError(std::string("fading: ") + e.what());
    }
    return {std::make_shared<FadingKernel>(noise_std), std::move(state)};
}

KernelWithState make_rayleigh_surrogate(double fade_std, double noise_std)
{
    return {std::make_shared<RayleighSurrogateKernel>(fade_std, noise_std), StateModel::point(1.0)};
}

}  // namespace capax
