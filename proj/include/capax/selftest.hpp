#pragma once

#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "capax/info.hpp"
#include "capax/measure.hpp"

namespace capax {

using RhoFunction = std::function<double(double x, const OutputLaw& law, const ConstraintSpec& constraints,
                                         std::span<const double> gamma, double capacity_bits)>;

struct SelftestOptions {
    /// Residual under test; tests swap in a broken one to check the suite notices.
    RhoFunction rho;
    std::uint64_t seed = 20240601;
};

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// A random built-in channel (AWGN, finite-state fading with any side
/// information, or the Rayleigh surrogate) and a random atomic input on it.
struct RandomConfig {
    MarginalChannel channel;
    AtomicMeasure measure;
    std::string label;
};

RandomConfig random_config(std::mt19937_64& rng, std::size_t max_atoms = 5);

/// Finite-alphabet equivalence, sandwich, convexity/concavity, gradient and
/// residual/Gateaux identity suites at reduced sizes.
std::vector<SuiteResult> run_selftest(const SelftestOptions& options = {});

}  // namespace capax
