#include "capax/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "capax/errors.hpp"

namespace capax {

namespace {

constexpr double kLogFloor = 1e-300;
constexpr double kWarmStartFloor = 1e-8;

// Likelihoods of a fixed set of atoms tabulated on the quadrature nodes, so
// that repeated weight updates only redo the output law and its logarithm.
class SupportTable {
public:
    SupportTable(std::vector<double> atoms, const Problem& problem, const OutputSchemes& schemes)
        : atoms_(std::move(atoms)), problem_(&problem), schemes_(&schemes)
    {
        const auto& ch = problem.channel;
        const std::size_t n = atoms_.size();
        likelihood_.resize(schemes.size());
        negentropy_.assign(n, 0.0);
        for (std::size_t v = 0; v < schemes.size(); ++v) {
            const auto& s = schemes[v];
            const std::size_t K = s.size();
            auto& F = likelihood_[v];
            F.resize(n * K);
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    const double f = ch.density(s.nodes[k], atoms_[j], v);
                    F[j * K + k] = f;
                    if (f > 0.0) acc += s.weights[k] * f * std::log(f);
                }
                negentropy_[j] += ch.r(v) * acc;
            }
        }
        const auto& spec = problem.constraints;
        costs_.assign(spec.size(), std::vector<double>(n));
        for (std::size_t i = 0; i < spec.size(); ++i)
            for (std::size_t j = 0; j < n; ++j) costs_[i][j] = spec.function(i)(atoms_[j]);
    }

    struct Eval {
        std::vector<double> phi;  // i(x_j) - Σ γ g(x_j), bits
        std::vector<double> moments;
        double info = 0.0;
        double lagrangian = 0.0;
        double gap = 0.0;  // max_j φ_j - Σ p φ over atoms
        double mean_phi = 0.0;
    };

    std::size_t size() const noexcept { return atoms_.size(); }
    const std::vector<double>& atoms() const noexcept { return atoms_; }
    double cost(std::size_t i, std::size_t j) const { return costs_[i][j]; }

    double moment(std::size_t i, std::span<const double> p) const
    {
        double acc = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) acc += p[j] * costs_[i][j];
        return acc;
    }

    Eval evaluate(std::span<const double> p, std::span<const double> gamma) const
    {
        const auto& ch = problem_->channel;
        const auto& spec = problem_->constraints;
        const std::size_t n = atoms_.size();
        std::vector<double> cross(n, 0.0);
        std::vector<double> q;
        std::vector<double> tmp;
        for (std::size_t v = 0; v < schemes_->size(); ++v) {
            const auto& s = (*schemes_)[v];
            const std::size_t K = s.size();
            const auto& F = likelihood_[v];
            q.assign(K, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                if (p[j] <= 0.0) continue;
                const double* row = F.data() + j * K;
                for (std::size_t k = 0; k < K; ++k) q[k] += p[j] * row[k];
            }
            tmp.resize(K);
            for (std::size_t k = 0; k < K; ++k) tmp[k] = s.weights[k] * std::log(std::max(q[k], kLogFloor));
            const double r = ch.r(v);
            for (std::size_t j = 0; j < n; ++j) {
                const double* row = F.data() + j * K;
                double acc = 0.0;
                for (std::size_t k = 0; k < K; ++k) acc += row[k] * tmp[k];
                cross[j] += r * acc;
            }
        }
        Eval e;
        e.phi.resize(n);
        e.moments.resize(spec.size());
        for (std::size_t i = 0; i < spec.size(); ++i) e.moments[i] = moment(i, p);
        for (std::size_t j = 0; j < n; ++j) {
            double phi = (negentropy_[j] - cross[j]) / kLn2;
            for (std::size_t i = 0; i < spec.size(); ++i) phi -= gamma[i] * costs_[i][j];
            e.phi[j] = phi;
            e.info += p[j] * (negentropy_[j] - cross[j]) / kLn2;
            e.mean_phi += p[j] * phi;
        }
        e.lagrangian = e.info;
        for (std::size_t i = 0; i < spec.size(); ++i) e.lagrangian -= gamma[i] * (e.moments[i] - spec.bound(i));
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j)
            if (p[j] > 0.0) best = std::max(best, e.phi[j]);
        e.gap = best - e.mean_phi;
        return e;
    }

private:
    std::vector<double> atoms_;
    const Problem* problem_;
    const OutputSchemes* schemes_;
    std::vector<std::vector<double>> likelihood_;
    std::vector<double> negentropy_;
    std::vector<std::vector<double>> costs_;
};

std::vector<double> multiplicative_update(std::span<const double> p, const std::vector<double>& phi)
{
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p.size(); ++j)
        if (p[j] > 0.0) top = std::max(top, phi[j]);
    if (!std::isfinite(top)) throw DegenerateMeasureError("weight update: every exponent is -infinity");
    std::vector<double> out(p.size());
    double z = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        out[j] = p[j] > 0.0 ? p[j] * std::exp2(phi[j] - top) : 0.0;
        z += out[j];
    }
    if (!(z > 0.0) || !std::isfinite(z)) throw DegenerateMeasureError("weight update: normalizer vanished");
    for (double& w : out) w /= z;
    return out;
}

struct BaResult {
    std::vector<double> p;
    SupportTable::Eval eval;
    int iterations = 0;
};

// Fixed-point weight iteration with squared extrapolation (SQUAREM): two
// plain steps give a secant direction, the extrapolated point is kept only
// when it stays in the simplex and does not lower the Lagrangian.
BaResult ba_converge(const SupportTable& table, std::vector<double> p, std::span<const double> gamma,
                     const SolverConfig& cfg)
{
    const std::size_t n = p.size();
    BaResult out;
    SupportTable::Eval e0 = table.evaluate(p, gamma);
    int steps = 0;
    while (e0.gap > cfg.ba_tol && steps < cfg.max_ba_iters) {
        std::vector<double> p1 = multiplicative_update(p, e0.phi);
        SupportTable::Eval e1 = table.evaluate(p1, gamma);
        ++steps;
        if (e1.gap <= cfg.ba_tol || steps >= cfg.max_ba_iters) {
            p = std::move(p1);
            e0 = std::move(e1);
            break;
        }
        std::vector<double> p2 = multiplicative_update(p1, e1.phi);
        SupportTable::Eval e2 = table.evaluate(p2, gamma);
        ++steps;

        double rr = 0.0;
        double vv = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double r = p1[j] - p[j];
            const double v = p2[j] - 2.0 * p1[j] + p[j];
            rr += r * r;
            vv += v * v;
        }
        if (vv > 0.0) {
            double alpha = -std::sqrt(rr / vv);
            for (int back = 0; back < 10 && alpha < -1.0; ++back, alpha = 0.5 * (alpha - 1.0)) {
                std::vector<double> trial(n);
                bool inside = true;
                double z = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double r = p1[j] - p[j];
                    const double v = p2[j] - 2.0 * p1[j] + p[j];
                    trial[j] = p[j] - 2.0 * alpha * r + alpha * alpha * v;
                    if (p[j] > 0.0 && !(trial[j] > 0.0)) inside = false;
                    if (p[j] == 0.0) trial[j] = 0.0;
                    z += trial[j];
                }
                if (!inside || !(z > 0.0)) continue;
                for (double& w : trial) w /= z;
                SupportTable::Eval et = table.evaluate(trial, gamma);
                if (et.lagrangian >= e2.lagrangian) {
                    p2 = std::move(trial);
                    e2 = std::move(et);
                    break;
                }
            }
        }
        p = std::move(p2);
        e0 = std::move(e2);
    }
    out.eval = std::move(e0);
    out.iterations = steps;
    out.p = std::move(p);
    return out;
}

std::vector<double> floored(std::span<const double> p)
{
    std::vector<double> out(p.begin(), p.end());
    double z = 0.0;
    for (double& w : out) {
        w = std::max(w, kWarmStartFloor);
        z += w;
    }
    for (double& w : out) w /= z;
    return out;
}

std::vector<std::size_t> moment_constraints(const ConstraintSpec& spec)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < spec.size(); ++i)
        if (spec.function(i).kind() != ConstraintKind::peak_indicator) out.push_back(i);
    return out;
}

// Weights and multiplier of constraint `ci` with the other multipliers fixed.
void search_single(const SupportTable& table, std::size_t ci, std::vector<double>& gamma, std::vector<double>& p,
                   const Problem& problem, const SolverConfig& cfg, int& ba_iters)
{
    const double bound = problem.constraints.bound(ci);
    const std::vector<double> warm = floored(p);
    auto weights_at = [&](double g) {
        std::vector<double> trial = gamma;
        trial[ci] = g;
        BaResult r = ba_converge(table, warm, trial, cfg);
        ba_iters += r.iterations;
        return r;
    };
    auto excess = [&](const BaResult& r) { return r.eval.moments[ci] - bound; };

    double lo = 0.0;
    double hi = 0.0;
    BaResult at_lo;
    BaResult at_hi;
    const double start = gamma[ci];
    if (start > 0.0) {
        BaResult r = weights_at(start);
        if (excess(r) > 0.0) {
            lo = start;
            at_lo = std::move(r);
            hi = std::min(2.0 * start, cfg.gamma_max);
            at_hi = weights_at(hi);
        } else {
            hi = start;
            at_hi = std::move(r);
            lo = 0.5 * start;
            at_lo = weights_at(lo);
            for (int k = 0; excess(at_lo) <= 0.0 && k < 6; ++k) {
                hi = lo;
                at_hi = std::move(at_lo);
                lo *= 0.25;
                at_lo = weights_at(lo);
            }
            if (excess(at_lo) <= 0.0) {
                hi = lo;
                at_hi = std::move(at_lo);
                lo = 0.0;
                at_lo = weights_at(0.0);
            }
        }
    } else {
        lo = 0.0;
        at_lo = weights_at(0.0);
        if (excess(at_lo) > 0.0) {
            hi = std::min(0.1, cfg.gamma_max);
            at_hi = weights_at(hi);
        }
    }
    if (lo == 0.0 && excess(at_lo) <= 0.0) {
        gamma[ci] = 0.0;
        p = std::move(at_lo.p);
        return;
    }
    while (excess(at_hi) > 0.0) {
        if (hi >= cfg.gamma_max)
            throw SolverError("multiplier search: constraint " + std::to_string(ci) + " still exceeds its bound by " +
                              std::to_string(excess(at_hi)) + " at gamma_max = " + std::to_string(cfg.gamma_max));
        lo = hi;
        at_lo = std::move(at_hi);
        hi = std::min(4.0 * hi, cfg.gamma_max);
        at_hi = weights_at(hi);
    }

    // Illinois-modified regula falsi on moment(γ) - Γ, which is non-increasing in γ.
    double f_lo = excess(at_lo);
    double f_hi = excess(at_hi);
    int side = 0;
    const double moment_tol = 1e-11 * std::max(1.0, bound);
    for (int it = 0; it < 200; ++it) {
        if (-f_hi <= moment_tol || hi - lo <= 1e-14 * std::max(1.0, hi)) break;
        double g = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if (!(g > lo && g < hi)) g = 0.5 * (lo + hi);
        BaResult r = weights_at(g);
        const double f = excess(r);
        if (f > 0.0) {
            lo = g;
            f_lo = f;
            at_lo = std::move(r);
            if (side == -1) f_hi *= 0.5;
            side = -1;
        } else {
            hi = g;
            f_hi = f;
            at_hi = std::move(r);
            if (side == 1) f_lo *= 0.5;
            side = 1;
        }
    }
    // The bracket ends share a support, so the moment is linear along the
    // segment between their weights: pick the point that meets the bound.
    const double m_lo = at_lo.eval.moments[ci];
    const double m_hi = at_hi.eval.moments[ci];
    double lambda = 0.0;
    if (m_lo > m_hi) lambda = std::clamp((bound - m_hi) / (m_lo - m_hi), 0.0, 1.0);
    p.assign(at_hi.p.size(), 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = lambda * at_lo.p[j] + (1.0 - lambda) * at_hi.p[j];
    gamma[ci] = lambda * lo + (1.0 - lambda) * hi;
}

MultiplierResult multiplier_search_table(const SupportTable& table, std::vector<double> p, const Problem& problem,
                                         const SolverConfig& cfg, std::span<const double> warm_gamma)
{
    const auto& spec = problem.constraints;
    MultiplierResult out;
    std::vector<double> gamma(spec.size(), 0.0);
    if (warm_gamma.size() == spec.size())
        for (std::size_t i = 0; i < spec.size(); ++i) gamma[i] = std::max(0.0, warm_gamma[i]);
    const auto active = moment_constraints(spec);
    for (std::size_t i = 0; i < spec.size(); ++i)
        if (spec.function(i).kind() == ConstraintKind::peak_indicator) gamma[i] = 0.0;

    int ba_iters = 0;
    if (active.empty()) {
        BaResult r = ba_converge(table, floored(p), gamma, cfg);
        ba_iters += r.iterations;
        p = std::move(r.p);
    } else {
        const int passes = active.size() == 1 ? 1 : 50;
        for (int pass = 0; pass < passes; ++pass) {
            for (std::size_t ci : active) search_single(table, ci, gamma, p, problem, cfg, ba_iters);
            bool joint = true;
            for (std::size_t ci : active) {
                const double excess = table.moment(ci, p) - spec.bound(ci);
                if (excess > 1e-12 || std::abs(gamma[ci] * excess) > 0.1 * kSlacknessTol) joint = false;
            }
            if (joint) break;
        }
    }
    out.gamma = std::move(gamma);
    out.measure = AtomicMeasure::merged(table.atoms(), p);
    out.ba_iterations = ba_iters;
    return out;
}

double phi_dx(double x, const OutputLaw& law, const ConstraintSpec& spec, std::span<const double> gamma)
{
    double d = law.information_density_dx(x);
    for (std::size_t i = 0; i < spec.size(); ++i) d -= gamma[i] * spec.function(i).derivative(x);
    return d;
}

// Reflects the atom list onto itself: pairs (j, n-1-j) of the sorted atoms
// share |x| and weight, a middle atom sits at 0.
AtomicMeasure symmetrize(const AtomicMeasure& m, double merge_radius)
{
    const std::size_t n = m.size();
    std::vector<double> x(n);
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = n - 1 - j;
        if (j == k) {
            x[j] = 0.0;
            w[j] = m.weight(j);
            continue;
        }
        const double mag = 0.5 * std::abs(m.x(k) - m.x(j));
        x[j] = j < k ? -mag : mag;
        w[j] = 0.5 * (m.weight(j) + m.weight(k));
    }
    return AtomicMeasure::merged(std::move(x), std::move(w), merge_radius);
}

std::vector<double> initial_atoms(const Problem& problem, const SolverConfig& cfg, bool symmetric)
{
    const auto& dom = problem.domain;
    if (dom.is_finite()) return dom.points();
    const GridSpec g = cfg.initial_grid.value_or(GridSpec{dom.lo(), dom.hi(), cfg.default_grid_count});
    std::vector<double> x(g.count);
    const double h = (g.hi - g.lo) / static_cast<double>(g.count - 1);
    for (std::size_t k = 0; k < g.count; ++k)
        x[k] = k <= (g.count - 1) / 2 ? g.lo + h * static_cast<double>(k) : g.hi - h * static_cast<double>(g.count - 1 - k);
    if (cfg.seed != 0) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> jitter(-0.3 * h, 0.3 * h);
        if (symmetric) {
            for (std::size_t k = 0; k < g.count / 2; ++k) {
                if (k == 0) continue;
                const double d = jitter(rng);
                x[k] += d;
                x[g.count - 1 - k] -= d;
            }
        } else {
            for (std::size_t k = 1; k + 1 < g.count; ++k) x[k] += jitter(rng);
        }
    }
    for (double& v : x) {
        if (!dom.contains(v, 1e-12 * (1.0 + std::abs(v))))
            throw ArgumentError("solver: initial grid point " + std::to_string(v) + " lies outside the input domain");
        v = dom.project(v);
    }
    return x;
}

// Removes atoms whose residual is clearly below the running capacity
// estimate; after weight convergence their mass is negligible. Atoms near a
// `keep` location (fresh insertions whose weight is still settling) stay.
AtomicMeasure drop_dominated(const AtomicMeasure& m, std::span<const double> gamma, const Problem& problem,
                             const OutputSchemes& schemes, const SolverConfig& cfg, std::span<const double> keep)
{
    const SupportTable table(m.locations(), problem, schemes);
    const auto e = table.evaluate(m.weights(), gamma);
    std::vector<double> x;
    std::vector<double> w;
    const std::size_t best = static_cast<std::size_t>(std::max_element(e.phi.begin(), e.phi.end()) - e.phi.begin());
    for (std::size_t j = 0; j < m.size(); ++j) {
        const double residual = e.phi[j] - e.mean_phi;
        const bool kept = std::any_of(keep.begin(), keep.end(),
                                      [&](double k) { return std::abs(k - m.x(j)) <= 10.0 * cfg.merge_radius; });
        const bool dominated = !kept && residual < -0.1 * cfg.kkt_tol && m.weight(j) < 1e-3;
        if (j != best && (dominated || m.weight(j) < cfg.weight_tol)) continue;
        x.push_back(m.x(j));
        w.push_back(m.weight(j));
    }
    return AtomicMeasure::merged(std::move(x), std::move(w), cfg.merge_radius);
}

AtomicMeasure improve_locations(AtomicMeasure m, std::span<const double> gamma, const Problem& problem,
                                const OutputSchemes& schemes, const SolverConfig& cfg, bool symmetric)
{
    const auto& spec = problem.constraints;
    const auto& dom = problem.domain;
    for (int it = 0; it < cfg.location_iters; ++it) {
        const OutputLaw law(m, problem.channel, schemes);
        const std::size_t n = m.size();
        std::vector<double> step(n, 0.0);
        double largest = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = m.x(j);
            const double d = phi_dx(x, law, spec, gamma);
            const double e = 1e-4 * (1.0 + std::abs(x));
            const double curv = (phi_dx(x + e, law, spec, gamma) - phi_dx(x - e, law, spec, gamma)) / (2.0 * e);
            double s = curv < -1e-12 ? -d / curv : cfg.location_step * (d > 0.0 ? 1.0 : -1.0) * std::min(1.0, std::abs(d));
            s = std::clamp(s, -cfg.location_step, cfg.location_step);
            if (dom.project(x + s) == x) s = 0.0;
            step[j] = s;
            largest = std::max(largest, std::abs(s));
        }
        if (largest < 1e-12) break;

        const double base = lagrangian(m, problem, gamma, schemes);
        bool accepted = false;
        double t = 1.0;
        for (int halving = 0; halving <= 20; ++halving, t *= 0.5) {
            std::vector<double> x(n);
            std::vector<double> w(m.weights().begin(), m.weights().end());
            for (std::size_t j = 0; j < n; ++j) x[j] = dom.project(m.x(j) + t * step[j]);
            AtomicMeasure trial = AtomicMeasure::merged(std::move(x), std::move(w), cfg.merge_radius);
            if (symmetric) trial = symmetrize(trial, cfg.merge_radius);
            if (lagrangian(trial, problem, gamma, schemes) >= base) {
                m = std::move(trial);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        // Re-balance the weights for the moved atoms at the same multipliers.
        const SupportTable table(m.locations(), problem, schemes);
        BaResult r = ba_converge(table, std::vector<double>(m.weights().begin(), m.weights().end()), gamma, cfg);
        m = AtomicMeasure::merged(table.atoms(), std::move(r.p));
        if (symmetric) m = symmetrize(m, cfg.merge_radius);
    }
    return m;
}

}  // namespace

void SolverConfig::validate() const
{
    if (initial_grid) {
        if (!(initial_grid->lo < initial_grid->hi)) throw ArgumentError("solver config: initial_grid needs lo < hi");
        if (initial_grid->count < 3) throw ArgumentError("solver config: initial_grid needs count >= 3");
    }
    if (default_grid_count < 3) throw ArgumentError("solver config: default grid count must be >= 3");
    if (!(kkt_tol > 0.0)) throw ArgumentError("solver config: kkt_tol must be > 0");
    if (!(weight_tol > 0.0 && weight_tol < 1.0)) throw ArgumentError("solver config: weight_tol must lie in (0, 1)");
    if (!(merge_radius >= 0.0)) throw ArgumentError("solver config: merge_radius must be >= 0");
    if (!(ba_tol > 0.0)) throw ArgumentError("solver config: ba_tol must be > 0");
    if (max_outer_iters < 1) throw ArgumentError("solver config: max_outer_iters must be >= 1");
    if (max_ba_iters < 1) throw ArgumentError("solver config: max_ba_iters must be >= 1");
    if (!(gamma_max > 0.0)) throw ArgumentError("solver config: gamma_max must be > 0");
    if (!(location_step > 0.0)) throw ArgumentError("solver config: location_step must be > 0");
    if (location_iters < 0) throw ArgumentError("solver config: location_iters must be >= 0");
    if (!(insert_weight > 0.0 && insert_weight < 0.5)) throw ArgumentError("solver config: insert_weight must lie in (0, 0.5)");
    if (verify_points < 3) throw ArgumentError("solver config: verify_points must be >= 3");
    if (quadrature_points < 17 || quadrature_points % 2 == 0)
        throw ArgumentError("solver config: quadrature_points must be odd and >= 17");
    if (!(tail_sigmas >= 4.0)) throw ArgumentError("solver config: tail_sigmas must be >= 4");
}

OutputSchemes problem_schemes(const Problem& problem, const SolverConfig& config)
{
    std::vector<double> locs;
    const auto& dom = problem.domain;
    if (dom.is_finite()) {
        locs = dom.points();
    } else {
        locs = {dom.lo(), 0.5 * (dom.lo() + dom.hi()), dom.hi()};
        if (dom.contains(0.0)) locs.push_back(0.0);
    }
    if (config.initial_grid) {
        locs.push_back(config.initial_grid->lo);
        locs.push_back(config.initial_grid->hi);
    }
    return build_output_schemes(problem.channel, locs, config.tail_sigmas, config.quadrature_points);
}

double lagrangian(const AtomicMeasure& measure, const Problem& problem, std::span<const double> gamma,
                  const OutputSchemes& schemes)
{
    const auto& spec = problem.constraints;
    if (gamma.size() != spec.size()) throw ArgumentError("lagrangian: one multiplier per constraint is required");
    for (double g : gamma)
        if (!(g >= 0.0)) throw ArgumentError("lagrangian: multipliers must be >= 0");
    const InfoValue info = mutual_information(measure, problem.channel, schemes);
    if (!info.finite) return info.bits;
    double value = info.bits;
    for (std::size_t i = 0; i < spec.size(); ++i)
        if (gamma[i] != 0.0) value -= gamma[i] * (moment(measure, spec.function(i)) - spec.bound(i));
    return value;
}

AtomicMeasure ba_weight_update(const AtomicMeasure& measure, const Problem& problem, std::span<const double> gamma,
                               const OutputSchemes& schemes)
{
    if (gamma.size() != problem.constraints.size())
        throw ArgumentError("weight update: one multiplier per constraint is required");
    const OutputLaw law(measure, problem.channel, schemes);
    std::vector<double> phi(measure.size());
    for (std::size_t j = 0; j < measure.size(); ++j) {
        phi[j] = law.information_density(measure.x(j));
        for (std::size_t i = 0; i < gamma.size(); ++i) phi[j] -= gamma[i] * problem.constraints.function(i)(measure.x(j));
    }
    auto p = multiplicative_update(measure.weights(), phi);
    return AtomicMeasure(measure.locations(), std::move(p));
}

MultiplierResult multiplier_search(const AtomicMeasure& start, const Problem& problem, const SolverConfig& config,
                                   const OutputSchemes& schemes, std::span<const double> warm_gamma)
{
    config.validate();
    const SupportTable table(start.locations(), problem, schemes);
    return multiplier_search_table(table, std::vector<double>(start.weights().begin(), start.weights().end()),
                                   problem, config, warm_gamma);
}

std::vector<double> location_gradient(const AtomicMeasure& measure, std::size_t j, const Problem& problem,
                                      std::span<const double> gamma, const OutputSchemes& schemes)
{
    if (j >= measure.size()) throw ArgumentError("location gradient: atom index out of range");
    if (gamma.size() != problem.constraints.size())
        throw ArgumentError("location gradient: one multiplier per constraint is required");
    const OutputLaw law(measure, problem.channel, schemes);
    const double g = measure.weight(j) * phi_dx(measure.x(j), law, problem.constraints, gamma);
    if (!std::isfinite(g)) throw NumericError("location gradient is not finite at atom " + std::to_string(j));
    return {g};
}

AtomicMeasure refine_support(const AtomicMeasure& measure, const RhoScan& scan, const SolverConfig& config,
                             bool mirrored)
{
    if (scan.x.empty()) return measure;
    const auto worst = static_cast<std::size_t>(std::max_element(scan.rho.begin(), scan.rho.end()) - scan.rho.begin());
    if (!(scan.rho[worst] > config.kkt_tol)) return measure;
    std::vector<double> x = measure.locations();
    std::vector<double> w(measure.weights().begin(), measure.weights().end());
    const double target = scan.x[worst];
    std::vector<double> inserted{target};
    if (mirrored && std::abs(target) > config.merge_radius) inserted.push_back(-target);
    const double keep = 1.0 - config.insert_weight * static_cast<double>(inserted.size());
    for (double& v : w) v *= keep;
    for (double v : inserted) {
        x.push_back(v);
        w.push_back(config.insert_weight);
    }
    return prune(AtomicMeasure::merged(std::move(x), std::move(w), 0.0), config.weight_tol, config.merge_radius);
}

bool reflection_symmetric(const Problem& problem)
{
    if (!problem.channel.reflection_symmetric() || !problem.domain.symmetric()) return false;
    for (const auto& g : problem.constraints.functions())
        if (!g.is_even()) return false;
    return true;
}

CapacitySolution solve(const Problem& problem, const SolverConfig& config)
{
    config.validate();
    const OutputSchemes schemes = problem_schemes(problem, config);
    bool symmetric = reflection_symmetric(problem);
    if (config.initial_grid && config.initial_grid->lo != -config.initial_grid->hi) symmetric = false;

    const auto start = initial_atoms(problem, config, symmetric);
    AtomicMeasure current = AtomicMeasure::uniform(start);
    std::vector<double> gamma(problem.constraints.size(), 0.0);

    VerifyOptions vopt;
    vopt.kkt_tol = config.kkt_tol;
    vopt.grid_points = config.verify_points;

    CapacitySolution best;
    double best_residual = std::numeric_limits<double>::infinity();
    std::vector<TraceEntry> trace;
    bool have_best = false;
    std::vector<double> fresh;
    // Weight tolerance for this run; tightened while on-support residuals block the certificate.
    SolverConfig work = config;

    for (int it = 0; it < config.max_outer_iters; ++it) {
        MultiplierResult ms = multiplier_search(current, problem, work, schemes, gamma);
        gamma = ms.gamma;
        current = symmetric ? symmetrize(ms.measure, config.merge_radius) : ms.measure;
        AtomicMeasure reduced = drop_dominated(current, gamma, problem, schemes, config, fresh);
        if (reduced.size() != current.size()) {
            ms = multiplier_search(reduced, problem, work, schemes, gamma);
            gamma = ms.gamma;
            current = symmetric ? symmetrize(ms.measure, config.merge_radius) : ms.measure;
        }
        if (!problem.domain.is_finite() && config.location_iters > 0) {
            AtomicMeasure moved = improve_locations(current, gamma, problem, schemes, config, symmetric);
            moved = drop_dominated(moved, gamma, problem, schemes, config, fresh);
            ms = multiplier_search(moved, problem, work, schemes, gamma);
            gamma = ms.gamma;
            current = symmetric ? symmetrize(ms.measure, config.merge_radius) : ms.measure;
        }

        const double capacity = mutual_information(current, problem.channel, schemes).bits;
        vopt.grid_points = std::max(config.verify_points, 10 * current.size());
        const Verification ver = verify(current, gamma, capacity, problem, schemes, vopt);
        const double residual = std::max(ver.report.max_off_support_violation, ver.report.max_on_support_residual);
        trace.push_back({it, lagrangian(current, problem, gamma, schemes), residual, current.size()});

        const bool better = ver.report.certified || residual < best_residual || !have_best;
        if (better) {
            best.measure = current;
            best.capacity_bits = capacity;
            best.multipliers = gamma;
            best.kkt = ver.report;
            best.support = support_report(current, ver);
            best.certified = ver.report.certified;
            best.iterations = it + 1;
            best_residual = residual;
            have_best = true;
        }
        if (ver.report.certified) break;
        if (ver.report.max_on_support_residual > config.kkt_tol) work.ba_tol = std::max(0.1 * work.ba_tol, 1e-13);
        const auto before = current.locations();
        current = refine_support(current, ver.scan, config, symmetric);
        fresh.clear();
        for (double x : current.locations())
            if (std::find(before.begin(), before.end(), x) == before.end()) fresh.push_back(x);
    }
    best.trace = std::move(trace);
    return best;
}

double gateaux(const AtomicMeasure& base, const AtomicMeasure& direction, const Problem& problem,
               std::span<const double> gamma, const OutputSchemes& schemes)
{
    const auto& spec = problem.constraints;
    if (gamma.size() != spec.size()) throw ArgumentError("gateaux: one multiplier per constraint is required");
    const OutputLaw law(base, problem.channel, schemes);
    auto phi = [&](double x) {
        double v = law.information_density(x);
        for (std::size_t i = 0; i < spec.size(); ++i) v -= gamma[i] * spec.function(i)(x);
        return v;
    };
    double toward = 0.0;
    for (std::size_t j = 0; j < direction.size(); ++j) toward += direction.weight(j) * phi(direction.x(j));
    double at_base = 0.0;
    for (std::size_t j = 0; j < base.size(); ++j) at_base += base.weight(j) * phi(base.x(j));
    return toward - at_base;
}

}  // namespace capax
