#include "capax/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "capax/errors.hpp"

namespace capax {

InputDomain InputDomain::interval(double lo, double hi)
{
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw ConfigError("input domain: need finite lo < hi");
    InputDomain d;
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
}

InputDomain InputDomain::finite(std::vector<double> points)
{
    if (points.empty()) throw ConfigError("input domain: finite alphabet is empty");
    std::sort(points.begin(), points.end());
    if (std::adjacent_find(points.begin(), points.end()) != points.end())
        throw ConfigError("input domain: finite alphabet has duplicate points");
    for (double p : points)
        if (!std::isfinite(p)) throw ConfigError("input domain: non-finite point");
    InputDomain d;
    d.finite_ = true;
    d.lo_ = points.front();
    d.hi_ = points.back();
    d.points_ = std::move(points);
    return d;
}

bool InputDomain::contains(double x, double tol) const
{
    if (!finite_) return x >= lo_ - tol && x <= hi_ + tol;
    return std::abs(project(x) - x) <= tol;
}

double InputDomain::project(double x) const
{
    if (!finite_) return std::clamp(x, lo_, hi_);
    auto it = std::lower_bound(points_.begin(), points_.end(), x);
    if (it == points_.end()) return points_.back();
    if (it == points_.begin()) return *it;
    const double above = *it;
    const double below = *(it - 1);
    return (x - below) <= (above - x) ? below : above;
}

bool InputDomain::symmetric() const
{
    if (!finite_) return lo_ == -hi_;
    const std::size_t n = points_.size();
    for (std::size_t i = 0; i < n; ++i)
        if (points_[i] != -points_[n - 1 - i]) return false;
    return true;
}

InputDomain default_domain(const ConstraintSpec& constraints, double halfwidth_factor)
{
    double peak = std::numeric_limits<double>::infinity();
    double moment_scale = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        const auto& g = constraints.function(i);
        if (g.kind() == ConstraintKind::peak_indicator) {
            peak = std::min(peak, g.parameter());
        } else {
            moment_scale = std::min(moment_scale, std::pow(constraints.bound(i), 1.0 / g.parameter()));
        }
    }
    if (std::isfinite(peak)) return InputDomain::interval(-peak, peak);
    if (std::isfinite(moment_scale)) {
        if (!(halfwidth_factor > 0.0)) throw ConfigError("input domain: halfwidth factor must be > 0");
        const double a = halfwidth_factor * moment_scale;
        return InputDomain::interval(-a, a);
    }
    throw ConfigError("input domain: unconstrained problem needs a peak constraint or an explicit domain");
}

bool measure_in_domain(const AtomicMeasure& measure, const InputDomain& domain)
{
    for (std::size_t j = 0; j < measure.size(); ++j) {
        const double x = measure.x(j);
        const double tol = domain.is_finite() ? 1e-9 : 1e-12 * (1.0 + std::abs(x));
        if (!domain.contains(x, tol)) return false;
    }
    return true;
}

}  // namespace capax
