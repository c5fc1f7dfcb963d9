#include "capax/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "capax/kkt.hpp"
#include "capax/oracle.hpp"
#include "capax/report.hpp"
#include "capax/solver.hpp"

namespace capax {

namespace {

constexpr double kSandwichGap = 2.0 / (std::numbers::e * std::numbers::ln2);

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n, double floor = 0.0)
{
    std::exponential_distribution<double> e(1.0);
    std::vector<double> p(n);
    double z = 0.0;
    for (double& w : p) {
        w = e(rng) + floor;
        z += w;
    }
    for (double& w : p) w /= z;
    return p;
}

std::vector<double> random_locations(std::mt19937_64& rng, std::size_t n, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> x;
    while (x.size() < n) {
        const double c = u(rng);
        if (std::none_of(x.begin(), x.end(), [&](double y) { return std::abs(y - c) < 1e-3; })) x.push_back(c);
    }
    return x;
}

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

SuiteResult finite_alphabet_suite(std::mt19937_64& rng, int channels)
{
    double worst = 0.0;
    bool certified = true;
    for (int t = 0; t < channels; ++t) {
        std::vector<std::vector<double>> m;
        for (int i = 0; i < 4; ++i) {
            auto row = random_simplex(rng, 4);
            double head = row[0] + row[1] + row[2];
            row[3] = 1.0 - head;
            m.push_back(row);
        }
        FiniteChannel ch(m);
        const auto ref = classic_capacity_iteration(ch);
        const auto sol = solve(embedded_problem(embed_finite_channel(ch)));
        worst = std::max(worst, std::abs(sol.capacity_bits - ref.bits));
        certified = certified && sol.certified;
    }
    return {"finite_alphabet", certified && worst <= 1e-4,
            std::to_string(channels) + " channels, max |C - C_ref| = " + fmt(worst)};
}

SuiteResult sandwich_suite(std::mt19937_64& rng, int configs)
{
    double lower = -std::numeric_limits<double>::infinity();
    double upper = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < configs; ++t) {
        const auto cfg = random_config(rng);
        const auto schemes = schemes_for(cfg.channel, cfg.measure);
        const double info = mutual_information(cfg.measure, cfg.channel, schemes).bits;
        const double abs_info = abs_mutual_information(cfg.measure, cfg.channel, schemes);
        lower = std::max(lower, info - abs_info);
        upper = std::max(upper, abs_info - info - kSandwichGap);
    }
    return {"sandwich", lower <= 1e-12 && upper <= 1e-6,
            std::to_string(configs) + " configs, max(I - |I|) = " + fmt(lower) + ", max(|I| - I - 2/(e ln 2)) = " +
                fmt(upper)};
}

SuiteResult convexity_suite(std::mt19937_64& rng, int trials)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double divergence_violation = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(u(rng) * 6);
        const auto p1 = random_simplex(rng, n, 1e-3);
        const auto p2 = random_simplex(rng, n, 1e-3);
        const auto q1 = random_simplex(rng, n, 1e-3);
        const auto q2 = random_simplex(rng, n, 1e-3);
        const double a = u(rng);
        std::vector<double> pm(n);
        std::vector<double> qm(n);
        for (std::size_t i = 0; i < n; ++i) {
            pm[i] = a * p1[i] + (1 - a) * p2[i];
            qm[i] = a * q1[i] + (1 - a) * q2[i];
        }
        const double lhs = relative_entropy_discrete(pm, qm).bits;
        const double rhs =
            a * relative_entropy_discrete(p1, q1).bits + (1 - a) * relative_entropy_discrete(p2, q2).bits;
        divergence_violation = std::max(divergence_violation, lhs - rhs);
    }

    double concavity_violation = -std::numeric_limits<double>::infinity();
    const int info_trials = std::max(1, trials / 5);
    for (int t = 0; t < info_trials; ++t) {
        auto cfg = random_config(rng);
        const std::size_t n = 1 + static_cast<std::size_t>(u(rng) * 4);
        // Share some locations with the first measure so merging is exercised.
        auto x = random_locations(rng, n, -3.0, 3.0);
        x[0] = cfg.measure.x(0);
        const AtomicMeasure second(x, random_simplex(rng, n));
        const auto schemes = schemes_for(cfg.channel, cfg.measure, second.locations());
        const double i1 = mutual_information(cfg.measure, cfg.channel, schemes).bits;
        const double i2 = mutual_information(second, cfg.channel, schemes).bits;
        for (double a : {0.25, 0.5, 0.75}) {
            const double im = mutual_information(mix(cfg.measure, second, a), cfg.channel, schemes).bits;
            concavity_violation = std::max(concavity_violation, a * i1 + (1 - a) * i2 - im);
        }
    }

    double strict_gap = std::numeric_limits<double>::infinity();
    double equal_gap = 0.0;
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 3 + static_cast<std::size_t>(t % 4);
        const auto q = random_simplex(rng, n, 1e-2);
        const auto p1 = random_simplex(rng, n, 1e-2);
        auto p2 = p1;
        std::rotate(p2.begin(), p2.begin() + 1, p2.end());  // differs from p1 where both are positive
        std::vector<double> pm(n);
        for (std::size_t i = 0; i < n; ++i) pm[i] = 0.5 * (p1[i] + p2[i]);
        const double gap = 0.5 * relative_entropy_discrete(p1, q).bits + 0.5 * relative_entropy_discrete(p2, q).bits -
                           relative_entropy_discrete(pm, q).bits;
        strict_gap = std::min(strict_gap, gap);
        const double same = relative_entropy_discrete(p1, q).bits;
        equal_gap = std::max(equal_gap, std::abs(0.5 * same + 0.5 * same - same));
    }
    const bool ok = divergence_violation <= 1e-9 && concavity_violation <= 1e-9 && strict_gap > 1e-6 && equal_gap <= 1e-12;
    return {"convexity", ok,
            std::to_string(trials) + " divergence trials max violation " + fmt(divergence_violation) + ", " +
                std::to_string(info_trials) + " concavity trials max violation " + fmt(concavity_violation) +
                ", min strict gap " + fmt(strict_gap)};
}

SuiteResult gradient_suite(std::mt19937_64& rng, int configs)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < configs; ++t) {
        auto cfg = random_config(rng);
        while (cfg.measure.size() < 2) cfg = random_config(rng);
        const double bound = 0.5 + 2.0 * u(rng);
        Problem problem{cfg.channel, ConstraintSpec({ConstraintFunction::average_power()}, {bound}),
                        InputDomain::interval(-5.0, 5.0)};
        const std::vector<double> gamma{u(rng)};
        const std::vector<double> margin{-4.0, 4.0};
        const auto schemes = schemes_for(cfg.channel, cfg.measure, margin);
        for (std::size_t j = 0; j < cfg.measure.size(); ++j) {
            const double g = location_gradient(cfg.measure, j, problem, gamma, schemes).front();
            const double h = 1e-4 * (1.0 + std::abs(cfg.measure.x(j)));
            auto shifted = [&](double d) {
                auto x = cfg.measure.locations();
                x[j] += d;
                const AtomicMeasure m(x, std::vector<double>(cfg.measure.weights().begin(), cfg.measure.weights().end()));
                return lagrangian(m, problem, gamma, schemes);
            };
            const double fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            worst = std::max(worst, std::abs(g - fd) / std::max(std::abs(fd), 1e-6));
        }
    }
    return {"gradient", worst <= 1e-4, std::to_string(configs) + " configs, max relative error " + fmt(worst)};
}

SuiteResult identity_suite(std::mt19937_64& rng, int configs, int points, const RhoFunction& rho_fn)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < configs; ++t) {
        const auto cfg = random_config(rng);
        // With C = I(P) and every constraint tight, the residual is exactly the
        // Gateaux differential toward a point mass.
        const ConstraintSpec spec({ConstraintFunction::average_power()}, {moment(cfg.measure, ConstraintFunction::average_power())});
        Problem problem{cfg.channel, spec, InputDomain::interval(-4.0, 4.0)};
        const std::vector<double> gamma{u(rng)};
        const std::vector<double> margin{-4.0, 4.0};
        const auto schemes = schemes_for(cfg.channel, cfg.measure, margin);
        const OutputLaw law(cfg.measure, cfg.channel, schemes);
        const double capacity = mutual_information(cfg.measure, cfg.channel, schemes).bits;
        for (int k = 0; k < points; ++k) {
            const double x = -4.0 + 8.0 * k / (points - 1);
            const double r = rho_fn(x, law, spec, gamma, capacity);
            const double g = gateaux(cfg.measure, AtomicMeasure::dirac(x), problem, gamma, schemes);
            worst = std::max(worst, std::abs(r - g));
        }
    }
    return {"rho_gateaux_identity", worst <= 1e-10,
            std::to_string(configs) + " configs x " + std::to_string(points) + " points, max |rho - gateaux| = " + fmt(worst)};
}

}  // namespace

RandomConfig random_config(std::mt19937_64& rng, std::size_t max_atoms)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int kind = static_cast<int>(u(rng) * 3);
    const double noise = 0.4 + 1.2 * u(rng);
    MarginalChannel channel = [&] {
        if (kind == 0) {
            auto ks = make_awgn(noise);
            return marginalize(ks.kernel, make_side_info(SideInfoKind::none, ks.state));
        }
        if (kind == 1) {
            const std::size_t states = 2 + static_cast<std::size_t>(u(rng) * 2);
            std::vector<double> gains;
            for (std::size_t s = 0; s < states; ++s) gains.push_back(0.3 + 1.5 * u(rng));
            auto ks = make_finite_state_fading(gains, random_simplex(rng, states, 0.1), noise);
            const int side = static_cast<int>(u(rng) * 3);
            const auto kind_v = side == 0 ? SideInfoKind::none : side == 1 ? SideInfoKind::full : SideInfoKind::quantized;
            return marginalize(ks.kernel, make_side_info(kind_v, ks.state, 2));
        }
        auto ks = make_rayleigh_surrogate(0.5 + u(rng), noise);
        return marginalize(ks.kernel, make_side_info(SideInfoKind::none, ks.state));
    }();
    const std::size_t n = 1 + static_cast<std::size_t>(u(rng) * static_cast<double>(max_atoms));
    AtomicMeasure measure(random_locations(rng, n, -3.0, 3.0), random_simplex(rng, n, 0.05));
    static const char* names[] = {"awgn", "fading", "rayleigh_surrogate"};
    return {std::move(channel), std::move(measure), names[kind]};
}

std::vector<SuiteResult> run_selftest(const SelftestOptions& options)
{
    const RhoFunction rho_fn = options.rho ? options.rho
                                           : RhoFunction([](double x, const OutputLaw& law, const ConstraintSpec& spec,
                                                            std::span<const double> gamma, double c) {
                                                 return rho(x, law, spec, gamma, c);
                                             });
    std::vector<SuiteResult> out;
    auto guarded = [&](const std::string& name, auto&& suite) {
        try {
            out.push_back(suite());
        } catch (const std::exception& e) {
            out.push_back({name, false, std::string("error: ") + e.what()});
        }
    };
    std::mt19937_64 rng(options.seed);
    guarded("finite_alphabet", [&] { return finite_alphabet_suite(rng, 5); });
    guarded("sandwich", [&] { return sandwich_suite(rng, 25); });
    guarded("convexity", [&] { return convexity_suite(rng, 200); });
    guarded("gradient", [&] { return gradient_suite(rng, 10); });
    guarded("rho_gateaux_identity", [&] { return identity_suite(rng, 2, 25, rho_fn); });
    return out;
}

}  // namespace capax
