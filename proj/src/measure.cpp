#include "capax/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "capax/errors.hpp"

namespace capax {

namespace {

bool lex_less(std::span<const double> a, std::span<const double> b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

double distance(std::span<const double> a, std::span<const double> b)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

// Greedy clustering in lexicographic order: an atom joins the current
// cluster when it lies within `radius` of the cluster's first member.
AtomicMeasure merge_clusters(std::size_t dim, const std::vector<double>& coords,
                             const std::vector<double>& weights, double radius)
{
    const std::size_t n = weights.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return lex_less({coords.data() + a * dim, dim}, {coords.data() + b * dim, dim});
    });

    std::vector<double> out_coords;
    std::vector<double> out_weights;
    std::vector<double> anchor(dim);
    std::vector<double> moment_sum(dim);
    double mass = 0.0;
    std::size_t members = 0;

    auto flush = [&] {
        if (members == 0) return;
        for (std::size_t i = 0; i < dim; ++i)
            out_coords.push_back(members > 1 && mass > 0.0 ? moment_sum[i] / mass : anchor[i]);
        out_weights.push_back(mass);
    };

    for (std::size_t idx : order) {
        std::span<const double> loc{coords.data() + idx * dim, dim};
        const double w = weights[idx];
        if (members > 0 && distance(loc, anchor) <= radius) {
            mass += w;
            ++members;
            for (std::size_t i = 0; i < dim; ++i) moment_sum[i] += w * loc[i];
            continue;
        }
        flush();
        mass = w;
        members = 1;
        for (std::size_t i = 0; i < dim; ++i) {
            moment_sum[i] = w * loc[i];
            anchor[i] = loc[i];
        }
    }
    flush();
    return AtomicMeasure(dim, std::move(out_coords), std::move(out_weights));
}

}  // namespace

AtomicMeasure::AtomicMeasure(std::vector<double> locations, std::vector<double> weights)
    : AtomicMeasure(1, std::move(locations), std::move(weights))
{
}

AtomicMeasure::AtomicMeasure(std::size_t dim, std::vector<double> coords, std::vector<double> weights)
    : dim_(dim)
{
    if (dim == 0) throw ArgumentError("atomic measure: dimension must be >= 1");
    if (weights.empty()) throw ArgumentError("atomic measure: at least one atom is required");
    if (coords.size() != dim * weights.size())
        throw ArgumentError("atomic measure: " + std::to_string(coords.size()) +
                            " coordinates do not match " + std::to_string(weights.size()) +
                            " atoms of dimension " + std::to_string(dim));
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("atomic measure: weights must be finite and >= 0");
        total += w;
    }
    if (std::abs(total - 1.0) > kWeightSumTolerance)
        throw ArgumentError("atomic measure: weights sum to " + std::to_string(total) + ", expected 1");
    for (double c : coords)
        if (!std::isfinite(c)) throw ArgumentError("atomic measure: locations must be finite");

    const std::size_t n = weights.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return lex_less({coords.data() + a * dim, dim}, {coords.data() + b * dim, dim});
    });
    coords_.reserve(coords.size());
    weights_.reserve(n);
    for (std::size_t idx : order) {
        coords_.insert(coords_.end(), coords.begin() + static_cast<std::ptrdiff_t>(idx * dim),
                       coords.begin() + static_cast<std::ptrdiff_t>((idx + 1) * dim));
        weights_.push_back(weights[idx]);
    }
    for (std::size_t j = 1; j < n; ++j) {
        if (std::equal(coords_.begin() + static_cast<std::ptrdiff_t>((j - 1) * dim),
                       coords_.begin() + static_cast<std::ptrdiff_t>(j * dim),
                       coords_.begin() + static_cast<std::ptrdiff_t>(j * dim)))
            throw ArgumentError("atomic measure: duplicate atom location");
    }
}

AtomicMeasure AtomicMeasure::dirac(double x)
{
    return AtomicMeasure({x}, {1.0});
}

AtomicMeasure AtomicMeasure::uniform(std::vector<double> locations)
{
    const std::size_t n = locations.size();
    if (n == 0) throw ArgumentError("atomic measure: at least one atom is required");
    return AtomicMeasure(std::move(locations), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

AtomicMeasure AtomicMeasure::normalized(std::vector<double> locations, std::vector<double> weights)
{
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ArgumentError("atomic measure: weights must be >= 0");
        total += w;
    }
    if (!(total > 0.0) || !std::isfinite(total)) throw DegenerateMeasureError("atomic measure: no mass to normalize");
    for (double& w : weights) w /= total;
    return AtomicMeasure(std::move(locations), std::move(weights));
}

AtomicMeasure AtomicMeasure::merged(std::vector<double> locations, std::vector<double> weights, double merge_radius)
{
    if (locations.size() != weights.size()) throw ArgumentError("atomic measure: locations and weights differ in length");
    if (!(merge_radius >= 0.0)) throw ArgumentError("atomic measure: merge radius must be >= 0");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ArgumentError("atomic measure: weights must be >= 0");
        total += w;
    }
    if (!(total > 0.0) || !std::isfinite(total)) throw DegenerateMeasureError("atomic measure: no mass to normalize");
    for (double& w : weights) w /= total;
    return merge_clusters(1, locations, weights, merge_radius);
}

std::span<const double> AtomicMeasure::location(std::size_t j) const
{
    return {coords_.data() + j * dim_, dim_};
}

double AtomicMeasure::x(std::size_t j) const
{
    if (dim_ != 1) throw ArgumentError("atomic measure: scalar access on a multi-dimensional measure");
    return coords_[j];
}

std::vector<double> AtomicMeasure::locations() const
{
    if (dim_ != 1) throw ArgumentError("atomic measure: scalar access on a multi-dimensional measure");
    return coords_;
}

ConstraintFunction ConstraintFunction::average_power()
{
    return {ConstraintKind::average_power, 2.0};
}

ConstraintFunction ConstraintFunction::custom_moment(double order)
{
    if (!(order > 0.0) || !std::isfinite(order)) throw ArgumentError("custom moment: order must be > 0");
    return {ConstraintKind::custom_moment, order};
}

ConstraintFunction ConstraintFunction::peak_indicator(double amplitude)
{
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw ArgumentError("peak constraint: amplitude must be > 0");
    return {ConstraintKind::peak_indicator, amplitude};
}

double ConstraintFunction::operator()(std::span<const double> x) const
{
    if (x.size() == 1) return (*this)(x[0]);
    double sq = 0.0;
    for (double c : x) sq += c * c;
    switch (kind_) {
    case ConstraintKind::average_power: return sq;
    case ConstraintKind::custom_moment: return std::pow(std::sqrt(sq), parameter_);
    case ConstraintKind::peak_indicator: return std::sqrt(sq) > parameter_ ? 1.0 : 0.0;
    }
    return 0.0;
}

double ConstraintFunction::operator()(double x) const
{
    switch (kind_) {
    case ConstraintKind::average_power: return x * x;
    case ConstraintKind::custom_moment: return std::pow(std::abs(x), parameter_);
    case ConstraintKind::peak_indicator: return std::abs(x) > parameter_ ? 1.0 : 0.0;
    }
    return 0.0;
}

double ConstraintFunction::derivative(double x) const
{
    switch (kind_) {
    case ConstraintKind::average_power: return 2.0 * x;
    case ConstraintKind::custom_moment: {
        if (x == 0.0) return 0.0;
        const double s = x > 0.0 ? 1.0 : -1.0;
        return s * parameter_ * std::pow(std::abs(x), parameter_ - 1.0);
    }
    case ConstraintKind::peak_indicator: return 0.0;
    }
    return 0.0;
}

ConstraintSpec::ConstraintSpec(std::vector<ConstraintFunction> functions, std::vector<double> bounds)
    : functions_(std::move(functions)), bounds_(std::move(bounds))
{
    if (functions_.size() != bounds_.size())
        throw ArgumentError("constraint spec: " + std::to_string(functions_.size()) + " functions but " +
                            std::to_string(bounds_.size()) + " bounds");
    for (std::size_t i = 0; i < bounds_.size(); ++i)
        if (!(bounds_[i] > 0.0) || !std::isfinite(bounds_[i]))
            throw ArgumentError("constraint spec: bound " + std::to_string(i) + " must be a finite value > 0");
}

double moment(const AtomicMeasure& measure, const ConstraintFunction& g)
{
    double acc = 0.0;
    for (std::size_t j = 0; j < measure.size(); ++j) acc += measure.weight(j) * g(measure.location(j));
    return acc;
}

Feasibility is_feasible(const AtomicMeasure& measure, const ConstraintSpec& spec)
{
    Feasibility out;
    out.slacks.reserve(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double m = moment(measure, spec.function(i));
        out.slacks.push_back(spec.bound(i) - m);
        if (m > spec.bound(i) + 1e-12) out.feasible = false;
    }
    return out;
}

AtomicMeasure mix(const AtomicMeasure& first, const AtomicMeasure& second, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("mix: alpha must lie in (0, 1)");
    if (first.dim() != second.dim()) throw ArgumentError("mix: dimension mismatch");
    std::vector<double> coords(first.coords().begin(), first.coords().end());
    coords.insert(coords.end(), second.coords().begin(), second.coords().end());
    std::vector<double> weights;
    weights.reserve(first.size() + second.size());
    for (double w : first.weights()) weights.push_back(alpha * w);
    for (double w : second.weights()) weights.push_back((1.0 - alpha) * w);
    return merge_clusters(first.dim(), coords, weights, 0.0);
}

AtomicMeasure prune(const AtomicMeasure& measure, double weight_floor, double merge_radius)
{
    if (!(weight_floor >= 0.0 && weight_floor < 1.0)) throw ArgumentError("prune: weight floor must lie in [0, 1)");
    if (!(merge_radius >= 0.0)) throw ArgumentError("prune: merge radius must be >= 0");
    const std::size_t dim = measure.dim();
    std::vector<double> coords;
    std::vector<double> weights;
    double kept = 0.0;
    for (std::size_t j = 0; j < measure.size(); ++j) {
        if (measure.weight(j) < weight_floor) continue;
        auto loc = measure.location(j);
        coords.insert(coords.end(), loc.begin(), loc.end());
        weights.push_back(measure.weight(j));
        kept += measure.weight(j);
    }
    if (weights.empty() || !(kept > 0.0)) throw DegenerateMeasureError("prune: every atom fell below the weight floor");
    for (double& w : weights) w /= kept;
    return merge_clusters(dim, coords, weights, merge_radius);
}

}  // namespace capax
