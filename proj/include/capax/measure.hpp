#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace capax {

inline constexpr double kWeightSumTolerance = 1e-12;
inline constexpr double kDefaultMergeRadius = 1e-6;
inline constexpr double kDefaultWeightFloor = 1e-9;

/// Finitely supported probability measure on R^d.
///
/// Atoms are stored in lexicographic order of their locations, so two
/// measures built from the same atoms in any order compare equal element by
/// element. Values are immutable once constructed.
class AtomicMeasure {
public:
    /// One-dimensional measure. Throws ArgumentError when the weights are
    /// negative, do not sum to one within 1e-12, or two locations coincide.
    AtomicMeasure(std::vector<double> locations, std::vector<double> weights);

    /// Measure on R^dim; `coords` holds the atom locations back to back.
    AtomicMeasure(std::size_t dim, std::vector<double> coords, std::vector<double> weights);

    static AtomicMeasure dirac(double x);
    static AtomicMeasure uniform(std::vector<double> locations);

    /// Rescales nonnegative weights to unit mass before validating.
    static AtomicMeasure normalized(std::vector<double> locations, std::vector<double> weights);

    /// Like normalized(), but atoms within `merge_radius` of each other
    /// (including exact repeats) are merged into their weighted centroid.
    static AtomicMeasure merged(std::vector<double> locations, std::vector<double> weights,
                                double merge_radius = 0.0);

    std::size_t size() const noexcept { return weights_.size(); }
    std::size_t dim() const noexcept { return dim_; }

    std::span<const double> location(std::size_t j) const;
    /// Scalar location of atom j; requires dim() == 1.
    double x(std::size_t j) const;
    double weight(std::size_t j) const { return weights_[j]; }

    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> coords() const noexcept { return coords_; }

    /// All scalar locations; requires dim() == 1.
    std::vector<double> locations() const;

private:
    std::size_t dim_ = 1;
    std::vector<double> coords_;
    std::vector<double> weights_;
};

enum class ConstraintKind { average_power, peak_indicator, custom_moment };

/// Nonnegative cost g(x) whose expectation is bounded by a ConstraintSpec.
///
/// All kinds depend on x only through |x|:
///   average_power   g(x) = |x|^2
///   custom_moment   g(x) = |x|^order
///   peak_indicator  g(x) = 1 if |x| > amplitude, else 0
class ConstraintFunction {
public:
    static ConstraintFunction average_power();
    static ConstraintFunction custom_moment(double order);
    static ConstraintFunction peak_indicator(double amplitude);

    ConstraintKind kind() const noexcept { return kind_; }
    /// Moment order for average_power/custom_moment, amplitude for peak_indicator.
    double parameter() const noexcept { return parameter_; }

    double operator()(std::span<const double> x) const;
    double operator()(double x) const;
    /// dg/dx for one-dimensional inputs. The peak indicator is treated as flat.
    double derivative(double x) const;

    /// g(x) == g(-x); true for every built-in kind.
    bool is_even() const noexcept { return true; }

private:
    ConstraintFunction(ConstraintKind kind, double parameter) : kind_(kind), parameter_(parameter) {}

    ConstraintKind kind_;
    double parameter_;
};

/// Moment constraints  ∫ g_i dP <= bound_i.
class ConstraintSpec {
public:
    ConstraintSpec() = default;
    /// Throws ArgumentError on length mismatch or a bound that is not > 0.
    ConstraintSpec(std::vector<ConstraintFunction> functions, std::vector<double> bounds);

    std::size_t size() const noexcept { return functions_.size(); }
    bool empty() const noexcept { return functions_.empty(); }
    const ConstraintFunction& function(std::size_t i) const { return functions_[i]; }
    double bound(std::size_t i) const { return bounds_[i]; }
    const std::vector<ConstraintFunction>& functions() const noexcept { return functions_; }
    const std::vector<double>& bounds() const noexcept { return bounds_; }

private:
    std::vector<ConstraintFunction> functions_;
    std::vector<double> bounds_;
};

struct Feasibility {
    bool feasible = true;
    /// bound_i - ∫ g_i dP; negative entries are violated constraints.
    std::vector<double> slacks;
};

/// Σ_j p_j g(x_j).
double moment(const AtomicMeasure& measure, const ConstraintFunction& g);

/// Feasible iff every moment is within its bound + 1e-12.
Feasibility is_feasible(const AtomicMeasure& measure, const ConstraintSpec& spec);

/// alpha * first + (1 - alpha) * second; coincident atoms are merged.
AtomicMeasure mix(const AtomicMeasure& first, const AtomicMeasure& second, double alpha);

/// Drops atoms lighter than `weight_floor`, merges atoms closer than
/// `merge_radius` into their mass-weighted centroid and renormalizes.
/// Throws DegenerateMeasureError if no atom survives.
AtomicMeasure prune(const AtomicMeasure& measure, double weight_floor = kDefaultWeightFloor,
                    double merge_radius = kDefaultMergeRadius);

}  // namespace capax
