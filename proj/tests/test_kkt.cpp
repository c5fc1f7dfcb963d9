#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "capax/errors.hpp"
#include "capax/kkt.hpp"
#include "capax/oracle.hpp"
#include "capax/solver.hpp"
#include "fixtures.hpp"

using namespace capax;
using namespace capax::testing;

namespace {

const CapacitySolution& peak_solution()
{
    static const CapacitySolution s = solve(awgn_peak(1.0, 1.0));
    return s;
}

const CapacitySolution& rayleigh_solution()
{
    static const CapacitySolution s = solve(rayleigh_power(1.0));
    return s;
}

AtomicMeasure perturbed(const AtomicMeasure& m, double delta)
{
    std::vector<double> w(m.weights().begin(), m.weights().end());
    std::size_t heaviest = 0;
    for (std::size_t j = 1; j < w.size(); ++j)
        if (w[j] > w[heaviest]) heaviest = j;
    w[heaviest] += delta;
    return AtomicMeasure::normalized(m.locations(), w);
}

}  // namespace

TEST_CASE("rho of a single atom on awgn")
{
    const Problem p = awgn_power(1.0, 1.0);
    const AtomicMeasure d0 = AtomicMeasure::dirac(0.0);
    const OutputSchemes schemes = problem_schemes(p, SolverConfig{});
    const std::vector<double> gamma{0.0};
    const double r = rho(1.0, d0, gamma, 0.0, p.channel, p.constraints, schemes);
    CHECK(std::abs(r - 0.5 / std::numbers::ln2) < 1e-8);
    CHECK(std::abs(r - 0.721348) < 1e-6);
    CHECK(r > 0.0);
}

TEST_CASE("rho on the support and under reflection at certified solutions")
{
    for (const Problem& p : {awgn_peak(1.0, 1.0), rayleigh_power(1.0)}) {
        const CapacitySolution s = solve(p);
        REQUIRE(s.certified);
        const OutputSchemes schemes = problem_schemes(p, SolverConfig{});
        for (std::size_t j = 0; j < s.measure.size(); ++j)
            CHECK(std::abs(rho(s.measure.x(j), s.measure, s.multipliers, s.capacity_bits, p.channel, p.constraints,
                               schemes)) <= s.kkt.kkt_tol);
        for (double x : {0.1, 0.55, 0.9}) {
            const double a = rho(x, s.measure, s.multipliers, s.capacity_bits, p.channel, p.constraints, schemes);
            const double b = rho(-x, s.measure, s.multipliers, s.capacity_bits, p.channel, p.constraints, schemes);
            CHECK(std::abs(a - b) <= 1e-8);
        }
    }
}

TEST_CASE("rho rejects a multiplier count mismatch")
{
    const Problem p = awgn_power(1.0, 1.0);
    const OutputSchemes schemes = problem_schemes(p, SolverConfig{});
    const std::vector<double> none;
    CHECK_THROWS_AS(rho(0.0, AtomicMeasure::dirac(0.0), none, 0.0, p.channel, p.constraints, schemes), ArgumentError);
}

TEST_CASE("verify examples")
{
    const CapacitySolution& s = peak_solution();
    const Problem p = awgn_peak(1.0, 1.0);
    const OutputSchemes schemes = problem_schemes(p, SolverConfig{});
    const Verification ok = verify(s.measure, s.multipliers, s.capacity_bits, p, schemes);
    CHECK(ok.report.certified);
    CHECK(ok.report.feasible);
    CHECK(ok.report.grid_count == kDefaultVerifyPoints);

    const AtomicMeasure bad = perturbed(s.measure, 0.05);
    const double c_bad = mutual_information(bad, p.channel, schemes).bits;
    CHECK_FALSE(verify(bad, s.multipliers, c_bad, p, schemes).report.certified);

    const EmbeddedChannel noiseless =
        embed_finite_channel(FiniteChannel({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}));
    const Problem fp = embedded_problem(noiseless);
    const AtomicMeasure uniform = AtomicMeasure::uniform(noiseless.inputs);
    const OutputSchemes fs = problem_schemes(fp, SolverConfig{});
    const Verification fv = verify(uniform, {}, mutual_information(uniform, fp.channel, fs).bits, fp, fs);
    CHECK(fv.report.certified);
    CHECK(fv.report.slackness_residuals.empty());
}

TEST_CASE("verify on awgn solver output")
{
    const Problem p = awgn_power(1.0, 1.0);
    const CapacitySolution s = solve(p);
    CHECK(s.certified);
    const OutputSchemes schemes = problem_schemes(p, SolverConfig{});
    CHECK(verify(s.measure, s.multipliers, s.capacity_bits, p, schemes).report.certified);
}

TEST_CASE("verify preconditions")
{
    const CapacitySolution& s = peak_solution();
    const Problem p = awgn_peak(1.0, 1.0);
    const OutputSchemes schemes = problem_schemes(p, SolverConfig{});
    VerifyOptions narrow;
    narrow.grid = Interval{-0.5, 0.5};
    CHECK_THROWS_AS(verify(s.measure, s.multipliers, s.capacity_bits, p, schemes, narrow), ArgumentError);
    VerifyOptions sparse;
    sparse.grid_points = 5;
    CHECK_THROWS_AS(verify(s.measure, s.multipliers, s.capacity_bits, p, schemes, sparse), ArgumentError);
    const std::vector<double> negative{-1.0};
    CHECK_THROWS_AS(verify(s.measure, negative, s.capacity_bits, p, schemes), ArgumentError);
}

TEST_CASE("certification definition and tolerance monotonicity")
{
    const CapacitySolution& s = rayleigh_solution();
    const Problem p = rayleigh_power(1.0);
    const OutputSchemes schemes = problem_schemes(p, SolverConfig{});
    const AtomicMeasure bad = perturbed(s.measure, 0.05);
    const double c_bad = mutual_information(bad, p.channel, schemes).bits;
    for (const auto& [m, c] : {std::pair{s.measure, s.capacity_bits}, std::pair{bad, c_bad}}) {
        bool was_certified = false;
        for (double tol : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1}) {
            VerifyOptions o;
            o.kkt_tol = tol;
            const KktReport r = verify(m, s.multipliers, c, p, schemes, o).report;
            bool slack_ok = true;
            for (double sl : r.slackness_residuals) slack_ok = slack_ok && std::abs(sl) <= kSlacknessTol;
            CHECK(r.certified == (r.feasible && r.max_off_support_violation <= tol &&
                                  r.max_on_support_residual <= tol && slack_ok));
            if (was_certified) CHECK(r.certified);
            was_certified = r.certified;
        }
    }
}

TEST_CASE("support report examples")
{
    const CapacitySolution& s = peak_solution();
    const Problem p = awgn_peak(1.0, 1.0);
    const OutputSchemes schemes = problem_schemes(p, SolverConfig{});
    const SupportReport sr = support_report(s.measure, verify(s.measure, s.multipliers, s.capacity_bits, p, schemes));
    CHECK(sr.atom_count == 2);
    CHECK(sr.classification == SupportClass::discrete);
    CHECK(sr.min_separation == doctest::Approx(2.0).epsilon(1e-3));

    const SmallSupportResult oracle = exhaustive_small_support(p, 3, std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0},
                                                               schemes);
    CHECK(oracle.measure.size() == sr.atom_count);

    // Useless channel: the output ignores the input entirely.
    const auto dead = make_finite_state_fading({0.0}, {1.0}, 1.0);
    const Problem useless{marginalize(dead.kernel, make_side_info(SideInfoKind::none, dead.state)), ConstraintSpec{},
                          InputDomain::interval(-1.0, 1.0)};
    const AtomicMeasure one = AtomicMeasure::dirac(0.0);
    const OutputSchemes us = problem_schemes(useless, SolverConfig{});
    const Verification uv = verify(one, {}, 0.0, useless, us);
    for (double r : uv.scan.rho) CHECK(std::abs(r) < 1e-12);
    const SupportReport ur = support_report(one, uv);
    CHECK(ur.classification == SupportClass::dense_suspected);
    CHECK(std::isinf(ur.min_separation));
    CHECK(ur.near_zero_rho_fraction == 1.0);
}

TEST_CASE("support report flags a particle approximation of a gaussian optimum")
{
    // The awgn optimum is N(0, P); at P = σ = 1 the residual of the exact
    // optimum is identically zero with γ = 1 / (4 ln 2) and C = 1/2.
    std::vector<double> xs, ws;
    for (int i = -100; i <= 100; ++i) {
        const double x = 0.04 * i;
        xs.push_back(x);
        ws.push_back(std::exp(-0.5 * x * x));
    }
    const AtomicMeasure gauss = AtomicMeasure::normalized(xs, ws);
    const double power = moment(gauss, ConstraintFunction::average_power());
    const auto k = make_awgn(1.0);
    const Problem p{marginalize(k.kernel, make_side_info(SideInfoKind::none, k.state)),
                    ConstraintSpec({ConstraintFunction::average_power()}, {power}), InputDomain::interval(-4.0, 4.0)};
    const OutputSchemes schemes = problem_schemes(p, SolverConfig{});
    const double c = mutual_information(gauss, p.channel, schemes).bits;
    const std::vector<double> gamma{1.0 / (4.0 * std::numbers::ln2)};
    VerifyOptions o;
    o.grid_points = 4001;
    o.kkt_tol = 1e-3;
    const SupportReport sr = support_report(gauss, verify(gauss, gamma, c, p, schemes, o));
    CHECK(sr.near_zero_rho_fraction > 0.5);
    CHECK(sr.classification == SupportClass::dense_suspected);
}

TEST_CASE("uniqueness diagnostic examples")
{
    const Problem p = awgn_power(1.0, 1.0);
    const OutputSchemes schemes = problem_schemes(p, SolverConfig{});
    const AtomicMeasure d0 = AtomicMeasure::dirac(0.0);
    const AtomicMeasure pm({-1.0, 1.0}, {0.5, 0.5});
    CHECK(uniqueness_diagnostic(d0, d0, p.channel, schemes, 1e-12) == OutputRelation::output_equivalent);
    CHECK(uniqueness_diagnostic(d0, pm, p.channel, schemes, 1e-3) == OutputRelation::distinguishable);
    CHECK(uniqueness_diagnostic(pm, d0, p.channel, schemes, 1e-3) == OutputRelation::distinguishable);
    CHECK(std::abs(output_density(d0, p.channel, 0)(0.0) - output_density(pm, p.channel, 0)(0.0) - 0.157) < 1e-3);

    CHECK_THROWS_AS(uniqueness_diagnostic(d0, AtomicMeasure(2, {0.0, 0.0}, {1.0}), p.channel, schemes, 1e-3),
                    ArgumentError);
}

TEST_CASE("two awgn solutions from different seeds share an output law")
{
    const Problem p = awgn_power(1.0, 1.0);
    SolverConfig a;
    SolverConfig b;
    b.seed = 5;
    const CapacitySolution s1 = solve(p, a);
    const CapacitySolution s2 = solve(p, b);
    REQUIRE(s1.certified);
    REQUIRE(s2.certified);
    const OutputSchemes schemes = problem_schemes(p, a);
    // Both laws are only kkt_tol-optimal: the bulk agrees to ~1e-4 relative,
    // the far tails (q < 1e-4) are set by the edge atoms and differ by < 1e-2.
    CHECK(uniqueness_diagnostic(s1.measure, s2.measure, p.channel, schemes, 1e-2) ==
          OutputRelation::output_equivalent);
    CHECK(uniqueness_diagnostic(s2.measure, s1.measure, p.channel, schemes, 1e-2) ==
          OutputRelation::output_equivalent);
    const OutputLaw q1(s1.measure, p.channel, schemes);
    const OutputLaw q2(s2.measure, p.channel, schemes);
    double l1 = 0.0;
    for (std::size_t k = 0; k < schemes[0].size(); ++k)
        l1 += schemes[0].weights[k] * std::abs(q1.values(0)[k] - q2.values(0)[k]);
    CHECK(l1 <= 1e-3);
}

TEST_CASE("property: uniqueness diagnostic is symmetric")
{
    const Problem p = fading_power(SideInfoKind::full);
    const OutputSchemes schemes = problem_schemes(p, SolverConfig{});
    const std::vector<AtomicMeasure> ms{AtomicMeasure::dirac(0.0), AtomicMeasure({-1.0, 1.0}, {0.5, 0.5}),
                                        AtomicMeasure({-1.0, 1.0}, {0.5 + 1e-5, 0.5 - 1e-5}),
                                        AtomicMeasure({-2.0, 0.0, 2.0}, {0.2, 0.6, 0.2})};
    for (const auto& a : ms)
        for (const auto& b : ms)
            for (double tol : {1e-9, 1e-4, 1e-1})
                CHECK(uniqueness_diagnostic(a, b, p.channel, schemes, tol) ==
                      uniqueness_diagnostic(b, a, p.channel, schemes, tol));
}
