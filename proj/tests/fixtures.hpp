#pragma once

#include "capax/channel.hpp"
#include "capax/measure.hpp"
#include "capax/problem.hpp"

namespace capax::testing {

inline Problem make_problem(const KernelWithState& k, SideInfoModel side_info, ConstraintSpec spec)
{
    InputDomain domain = default_domain(spec);
    return Problem{marginalize(k.kernel, std::move(side_info)), std::move(spec), std::move(domain)};
}

inline Problem awgn_power(double noise_std, double power)
{
    const auto k = make_awgn(noise_std);
    return make_problem(k, make_side_info(SideInfoKind::none, k.state),
                        ConstraintSpec({ConstraintFunction::average_power()}, {power}));
}

inline Problem awgn_peak(double amplitude, double noise_std)
{
    const auto k = make_awgn(noise_std);
    return make_problem(k, make_side_info(SideInfoKind::none, k.state),
                        ConstraintSpec({ConstraintFunction::peak_indicator(amplitude)}, {1.0}));
}

inline Problem fading_power(SideInfoKind kind, std::size_t bins = 1, double power = 1.0)
{
    const auto k = make_finite_state_fading({0.5, 1.5}, {0.5, 0.5}, 1.0);
    return make_problem(k, make_side_info(kind, k.state, bins),
                        ConstraintSpec({ConstraintFunction::average_power()}, {power}));
}

inline Problem rayleigh_power(double power)
{
    const auto k = make_rayleigh_surrogate(1.0, 1.0);
    return make_problem(k, make_side_info(SideInfoKind::none, k.state),
                        ConstraintSpec({ConstraintFunction::average_power()}, {power}));
}

}  // namespace capax::testing
