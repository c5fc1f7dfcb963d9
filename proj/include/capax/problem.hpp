#pragma once

#include <cstddef>
#include <vector>

#include "capax/channel.hpp"
#include "capax/measure.hpp"

namespace capax {

/// The input alphabet the optimization runs over: a closed interval of R or
/// a finite set of points (for embedded finite-alphabet channels).
class InputDomain {
public:
    static InputDomain interval(double lo, double hi);
    static InputDomain finite(std::vector<double> points);

    bool is_finite() const noexcept { return finite_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    /// Sorted points of a finite domain; empty for an interval.
    const std::vector<double>& points() const noexcept { return points_; }

    bool contains(double x, double tol = 1e-12) const;
    /// Nearest point of the domain.
    double project(double x) const;
    /// Invariant under x -> -x.
    bool symmetric() const;

private:
    bool finite_ = false;
    double lo_ = 0.0;
    double hi_ = 0.0;
    std::vector<double> points_;
};

/// Peak box when the spec carries a peak indicator; otherwise
/// ±halfwidth_factor · min_i Γ_i^(1/order_i) over the moment constraints.
/// Throws ConfigError when there is nothing to bound the domain.
InputDomain default_domain(const ConstraintSpec& constraints, double halfwidth_factor = 3.0);

/// A capacity problem: effective channel, moment constraints and input alphabet.
struct Problem {
    MarginalChannel channel;
    ConstraintSpec constraints;
    InputDomain domain;
};

/// Every atom of `measure` lies in the domain (finite domains: within 1e-9 of a point).
bool measure_in_domain(const AtomicMeasure& measure, const InputDomain& domain);

}  // namespace capax
