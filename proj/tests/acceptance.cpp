// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "capax/info.hpp"
#include "capax/kkt.hpp"
#include "capax/oracle.hpp"
#include "capax/selftest.hpp"
#include "capax/solver.hpp"
#include "fixtures.hpp"

using namespace capax;
using namespace capax::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Solved {
    std::string name;
    Problem problem;
    CapacitySolution solution;
    double seconds = 0.0;
};

Solved run(const std::string& name, Problem problem, const SolverConfig& cfg = {})
{
    const auto t0 = Clock::now();
    CapacitySolution s = solve(problem, cfg);
    return Solved{name, std::move(problem), std::move(s), seconds_since(t0)};
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail)
{
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << " (" << title << "): " << detail << std::endl;
    if (!ok) ++failures;
}

std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n)
{
    std::exponential_distribution<double> e(1.0);
    std::vector<double> p(n);
    double s = 0.0;
    for (double& v : p) s += v = e(rng);
    for (double& v : p) v /= s;
    return p;
}

FiniteChannel random_channel(std::mt19937_64& rng, std::size_t n, std::size_t m)
{
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) {
        auto r = random_distribution(rng, m);
        double head = 0.0;
        for (std::size_t j = 0; j + 1 < m; ++j) head += r[j];
        r.back() = 1.0 - head;
        rows.push_back(r);
    }
    return FiniteChannel(rows);
}

AtomicMeasure with_weight_shift(const AtomicMeasure& m, std::size_t j, double delta)
{
    std::vector<double> w(m.weights().begin(), m.weights().end());
    w[j] += delta;
    return AtomicMeasure::normalized(m.locations(), w);
}

double max_residual(const KktReport& r)
{
    return std::max(r.max_off_support_violation, r.max_on_support_residual);
}

}  // namespace

int main()
{
    const SolverConfig defaults;
    std::vector<const Solved*> certified_pool;
    std::vector<const Solved*> constrained_pool;

    // 1. AWGN against the closed form.
    const Solved awgn1 = run("awgn sigma=1", awgn_power(1.0, 1.0));
    const Solved awgn2 = run("awgn sigma=0.5", awgn_power(0.5, 1.0));
    {
        const double e1 = std::abs(awgn1.solution.capacity_bits - awgn_closed_form(1.0));
        const double e2 = std::abs(awgn2.solution.capacity_bits - awgn_closed_form(4.0));
        const bool ok = e1 <= 5e-3 && e2 <= 5e-3 && awgn1.solution.certified && awgn2.solution.certified &&
                        awgn1.seconds < 60.0 && awgn2.seconds < 60.0;
        report(1, "awgn closed form", ok,
               "C=" + fmt(awgn1.solution.capacity_bits) + " (err " + fmt(e1) + ", " + fmt(awgn1.seconds) +
                   " s), C=" + fmt(awgn2.solution.capacity_bits) + " (err " + fmt(e2) + ", " + fmt(awgn2.seconds) +
                   " s)");
    }

    // 2. Peak-limited two-point optimum.
    const Solved peak = run("peak A=1", awgn_peak(1.0, 1.0));
    {
        const auto& s = peak.solution;
        bool ok = s.certified && s.measure.size() == 2;
        if (s.measure.size() == 2) {
            ok = ok && std::abs(s.measure.x(0) + 1.0) <= 1e-3 && std::abs(s.measure.x(1) - 1.0) <= 1e-3 &&
                 std::abs(s.measure.weight(0) - 0.5) <= 1e-3 && std::abs(s.measure.weight(1) - 0.5) <= 1e-3;
        }
        ok = ok && max_residual(s.kkt) <= 1e-3;
        std::vector<double> grid;
        for (int i = -5; i <= 5; ++i) grid.push_back(0.2 * i);
        const SmallSupportResult brute =
            exhaustive_small_support(peak.problem, 3, grid, problem_schemes(peak.problem, defaults));
        const double gap = std::abs(brute.bits - s.capacity_bits);
        ok = ok && gap <= 1e-3;
        report(2, "peak-limited two-point optimum", ok,
               std::to_string(s.measure.size()) + " atoms, C=" + fmt(s.capacity_bits) + ", kkt " +
                   fmt(max_residual(s.kkt)) + ", exhaustive " + fmt(brute.bits) + " over " +
                   std::to_string(brute.candidates) + " candidates");
    }

    // 3. Embedded finite alphabets.
    {
        std::mt19937_64 rng(2024);
        double worst = 0.0;
        int uncertified = 0;
        for (int t = 0; t < 20; ++t) {
            const FiniteChannel fc = random_channel(rng, 4, 4);
            const CapacitySolution s = solve(embedded_problem(embed_finite_channel(fc)));
            worst = std::max(worst, std::abs(s.capacity_bits - classic_capacity_iteration(fc).bits));
            if (!s.certified) ++uncertified;
        }
        report(3, "finite-alphabet equivalence", worst <= 1e-4,
               "20 channels, max |C - C_classic| = " + fmt(worst) + ", non-certified " + std::to_string(uncertified));
    }

    // 9 and 10 are solved here so that 4, 8 and 11 can reuse them.
    const Solved fading_full = run("fading full", fading_power(SideInfoKind::full));
    const Solved fading_q1 = run("fading quantized 1", fading_power(SideInfoKind::quantized, 1));
    const Solved fading_none = run("fading none", fading_power(SideInfoKind::none));
    const Solved ray1 = run("rayleigh 1", rayleigh_power(1.0));
    const Solved ray4 = run("rayleigh 4", rayleigh_power(4.0));
    const Solved ray10 = run("rayleigh 10", rayleigh_power(10.0));

    for (const Solved* s : {&awgn1, &awgn2, &peak, &fading_full, &fading_q1, &fading_none, &ray1, &ray4, &ray10}) {
        if (s->solution.certified) certified_pool.push_back(s);
        bool moment_constraint = false;
        for (const auto& g : s->problem.constraints.functions())
            moment_constraint = moment_constraint || g.kind() != ConstraintKind::peak_indicator;
        if (moment_constraint) constrained_pool.push_back(s);
    }

    // 4. Certificates survive a finer grid; perturbed weights do not certify.
    {
        bool ok = certified_pool.size() == 9;
        double worst_fine = 0.0;
        int perturbed = 0;
        int wrongly_certified = 0;
        for (const Solved* s : certified_pool) {
            const auto& sol = s->solution;
            const OutputSchemes schemes = problem_schemes(s->problem, defaults);
            VerifyOptions fine;
            fine.kkt_tol = 2.0 * sol.kkt.kkt_tol;
            fine.grid_points = 2 * std::max(defaults.verify_points, 10 * sol.measure.size()) - 1;
            const KktReport r = verify(sol.measure, sol.multipliers, sol.capacity_bits, s->problem, schemes, fine).report;
            worst_fine = std::max(worst_fine, max_residual(r));
            ok = ok && r.certified;

            VerifyOptions normal;
            normal.kkt_tol = sol.kkt.kkt_tol;
            normal.grid_points = std::max(defaults.verify_points, 10 * sol.measure.size());
            for (std::size_t j = 0; j < sol.measure.size(); ++j) {
                for (double delta : {0.05, -0.05}) {
                    if (sol.measure.weight(j) + delta < 0.0) continue;
                    const AtomicMeasure m = with_weight_shift(sol.measure, j, delta);
                    const double c = mutual_information(m, s->problem.channel, schemes).bits;
                    ++perturbed;
                    if (verify(m, sol.multipliers, c, s->problem, schemes, normal).report.certified) {
                        ++wrongly_certified;
                        ok = false;
                    }
                }
            }
        }
        report(4, "certificate soundness", ok,
               std::to_string(certified_pool.size()) + "/9 solutions certified, worst residual on 2x grid " +
                   fmt(worst_fine) + " (limit 2*kkt_tol), " + std::to_string(wrongly_certified) + " of " +
                   std::to_string(perturbed) + " perturbations certified");
    }

    // 5. Sandwich inequality.
    {
        const double slack = 2.0 / (std::numbers::e * std::numbers::ln2);
        std::mt19937_64 rng(505);
        double worst_low = -1.0, worst_high = -1e300;
        for (int t = 0; t < 100; ++t) {
            const RandomConfig c = random_config(rng);
            const OutputSchemes schemes = schemes_for(c.channel, c.measure);
            const double i = mutual_information(c.measure, c.channel, schemes).bits;
            const double a = abs_mutual_information(c.measure, c.channel, schemes);
            worst_low = std::max(worst_low, i - a);
            worst_high = std::max(worst_high, a - i - slack);
        }
        report(5, "sandwich inequality", worst_low <= 0.0 && worst_high <= 1e-6,
               "100 configs, max(I - |I|) = " + fmt(worst_low) + ", max(|I| - I - 2/(e ln 2)) = " + fmt(worst_high));
    }

    // 6. Joint convexity of divergence, concavity of mutual information, strict cases.
    {
        std::mt19937_64 rng(606);
        std::uniform_real_distribution<double> ad(0.05, 0.95);
        double conv_violation = 0.0;
        for (int t = 0; t < 1000; ++t) {
            const std::size_t n = 2 + t % 7;
            const auto p1 = random_distribution(rng, n), p2 = random_distribution(rng, n);
            const auto q1 = random_distribution(rng, n), q2 = random_distribution(rng, n);
            const double a = ad(rng);
            std::vector<double> pm(n), qm(n);
            for (std::size_t i = 0; i < n; ++i) {
                pm[i] = a * p1[i] + (1 - a) * p2[i];
                qm[i] = a * q1[i] + (1 - a) * q2[i];
            }
            const double gap = relative_entropy_discrete(pm, qm).bits -
                               (a * relative_entropy_discrete(p1, q1).bits + (1 - a) * relative_entropy_discrete(p2, q2).bits);
            conv_violation = std::max(conv_violation, gap);
        }

        double conc_violation = 0.0;
        for (int t = 0; t < 1000; ++t) {
            const RandomConfig c = random_config(rng, 4);
            const RandomConfig other = random_config(rng, 4);
            std::vector<double> all = c.measure.locations();
            for (double x : other.measure.locations()) all.push_back(x);
            const OutputSchemes schemes = schemes_for(c.channel, c.measure, all);
            const double a = ad(rng);
            const double i1 = mutual_information(c.measure, c.channel, schemes).bits;
            const double i2 = mutual_information(other.measure, c.channel, schemes).bits;
            const double im = mutual_information(mix(c.measure, other.measure, a), c.channel, schemes).bits;
            conc_violation = std::max(conc_violation, a * i1 + (1 - a) * i2 - im);
        }

        // Strict cases: likelihood ratios that differ on a set of positive
        // mass, and input laws whose output laws differ.
        double min_strict = 1e300;
        for (int t = 0; t < 10; ++t) {
            const std::size_t n = 3 + t % 4;
            auto p1 = random_distribution(rng, n), q1 = random_distribution(rng, n);
            // Rotating the pair changes the ratio p/q at every index unless all ratios coincide.
            auto p2 = p1, q2 = q1;
            std::rotate(p2.begin(), p2.begin() + 1, p2.end());
            std::vector<double> pm(n), qm(n);
            for (std::size_t i = 0; i < n; ++i) {
                pm[i] = 0.5 * (p1[i] + p2[i]);
                qm[i] = 0.5 * (q1[i] + q2[i]);
            }
            const double gap = 0.5 * relative_entropy_discrete(p1, q1).bits +
                               0.5 * relative_entropy_discrete(p2, q2).bits - relative_entropy_discrete(pm, qm).bits;
            min_strict = std::min(min_strict, gap);
        }
        for (int t = 0; t < 10; ++t) {
            const RandomConfig c = random_config(rng, 3);
            const AtomicMeasure shifted = AtomicMeasure::dirac(c.measure.x(0) + 1.5);
            const AtomicMeasure& base = c.measure;
            std::vector<double> all = base.locations();
            all.push_back(shifted.x(0));
            const OutputSchemes schemes = schemes_for(c.channel, base, all);
            const double i1 = mutual_information(base, c.channel, schemes).bits;
            const double i2 = mutual_information(shifted, c.channel, schemes).bits;
            const double im = mutual_information(mix(base, shifted, 0.5), c.channel, schemes).bits;
            if (uniqueness_diagnostic(base, shifted, c.channel, schemes, 1e-6) == OutputRelation::distinguishable)
                min_strict = std::min(min_strict, im - 0.5 * (i1 + i2));
        }
        const bool ok = conv_violation <= 1e-9 && conc_violation <= 1e-9 && min_strict > 1e-6;
        report(6, "convexity and concavity", ok,
               "1000 divergence trials max violation " + fmt(conv_violation) + ", 1000 concavity trials max violation " +
                   fmt(conc_violation) + ", smallest strict gap " + fmt(min_strict));
    }

    // 7. Location gradient against central differences.
    {
        std::mt19937_64 rng(707);
        std::uniform_real_distribution<double> gd(0.0, 0.5);
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            const RandomConfig c = random_config(rng);
            const Problem p{c.channel, ConstraintSpec({ConstraintFunction::average_power()}, {2.0}),
                            InputDomain::interval(-4.0, 4.0)};
            const std::vector<double> gamma{gd(rng)};
            std::vector<double> probe = c.measure.locations();
            probe.push_back(-4.0);
            probe.push_back(4.0);
            const OutputSchemes schemes = schemes_for(p.channel, c.measure, probe);
            for (std::size_t j = 0; j < c.measure.size(); ++j) {
                const double h = 1e-4 * (1.0 + std::abs(c.measure.x(j)));
                auto moved = [&](double dx) {
                    std::vector<double> xs = c.measure.locations();
                    xs[j] += dx;
                    return AtomicMeasure(xs, std::vector<double>(c.measure.weights().begin(), c.measure.weights().end()));
                };
                const double fd =
                    (lagrangian(moved(h), p, gamma, schemes) - lagrangian(moved(-h), p, gamma, schemes)) / (2.0 * h);
                const double an = location_gradient(c.measure, j, p, gamma, schemes).at(0);
                worst = std::max(worst, std::abs(an - fd) / std::max(std::abs(fd), 1e-6));
            }
        }
        report(7, "gradient correctness", worst <= 1e-4, "50 configs, max relative error " + fmt(worst));
    }

    // 8. Complementary slackness.
    {
        double worst = 0.0;
        for (const Solved* s : constrained_pool)
            for (double r : s->solution.kkt.slackness_residuals) worst = std::max(worst, std::abs(r));
        report(8, "complementary slackness", worst <= 1e-6 && !constrained_pool.empty(),
               std::to_string(constrained_pool.size()) + " constrained solves, max |gamma (E g - Gamma)| " + fmt(worst));
    }

    // 9. Side-information ordering.
    {
        const double full = fading_full.solution.capacity_bits;
        const double q1 = fading_q1.solution.capacity_bits;
        const double none = fading_none.solution.capacity_bits;
        const bool ok = fading_full.solution.certified && fading_q1.solution.certified &&
                        fading_none.solution.certified && full >= q1 && std::abs(q1 - none) <= 1e-6 &&
                        full - none >= 1e-3;
        report(9, "side-information ordering", ok,
               "C_full=" + fmt(full) + " C_1bin=" + fmt(q1) + " C_none=" + fmt(none));
    }

    // 10. Rayleigh surrogate structure.
    {
        bool ok = true;
        std::string detail;
        double last = -1.0;
        for (const Solved* s : {&ray1, &ray4, &ray10}) {
            const auto& sol = s->solution;
            std::vector<double> mags;
            bool at_zero = false;
            for (double x : sol.measure.locations()) {
                if (std::abs(x) <= 1e-3) at_zero = true;
                const double m = std::abs(x);
                if (std::none_of(mags.begin(), mags.end(), [&](double v) { return std::abs(v - m) <= 1e-3; }))
                    mags.push_back(m);
            }
            ok = ok && sol.certified && sol.support.classification == SupportClass::discrete && at_zero &&
                 mags.size() <= 6 && sol.capacity_bits > last;
            last = sol.capacity_bits;
            detail += s->name + ": C=" + fmt(sol.capacity_bits) + ", " + std::to_string(mags.size()) + " magnitudes" +
                      (at_zero ? ", atom at 0" : ", no atom at 0") + "; ";
        }
        report(10, "rayleigh surrogate structure", ok, detail);
    }

    // 11. Residual equals the Gateaux differential toward a point mass.
    {
        double worst = 0.0;
        for (const Solved* s : {&awgn1, &peak, &fading_full, &ray1, &ray4}) {
            const auto& sol = s->solution;
            const OutputSchemes schemes = problem_schemes(s->problem, defaults);
            const double lo = s->problem.domain.lo(), hi = s->problem.domain.hi();
            for (int k = 0; k < 100; ++k) {
                const double x = lo + (hi - lo) * k / 99.0;
                const double r = rho(x, sol.measure, sol.multipliers, sol.capacity_bits, s->problem.channel,
                                     s->problem.constraints, schemes);
                const double g = gateaux(sol.measure, AtomicMeasure::dirac(x), s->problem, sol.multipliers, schemes);
                worst = std::max(worst, std::abs(r - g));
            }
        }
        report(11, "residual / gateaux identity", worst <= 1e-10, "5 configs x 100 points, max difference " + fmt(worst));
    }

    // 12. The built-in selftest.
    {
        const auto t0 = Clock::now();
        const int status = std::system((std::string(CAPAX_BINARY) + " selftest").c_str());
        const double secs = seconds_since(t0);
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        report(12, "capax selftest", code == 0 && secs < 300.0,
               "exit " + std::to_string(code) + " in " + fmt(secs) + " s");
    }

    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
