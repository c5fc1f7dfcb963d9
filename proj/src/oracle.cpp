#include "capax/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "capax/errors.hpp"
#include "capax/info.hpp"

namespace capax {

namespace {

// Σ_y W(y|x) log2(W(y|x) / q(y)) for every input row.
std::vector<double> row_divergences(const FiniteChannel& ch, const std::vector<double>& q)
{
    std::vector<double> d(ch.inputs(), 0.0);
    for (std::size_t x = 0; x < ch.inputs(); ++x)
        for (std::size_t y = 0; y < ch.outputs(); ++y) {
            const double w = ch(x, y);
            if (w > 0.0) d[x] += w * std::log2(w / q[y]);
        }
    return d;
}

std::vector<double> output_law(const FiniteChannel& ch, const std::vector<double>& p)
{
    std::vector<double> q(ch.outputs(), 0.0);
    for (std::size_t x = 0; x < ch.inputs(); ++x)
        for (std::size_t y = 0; y < ch.outputs(); ++y) q[y] += p[x] * ch(x, y);
    return q;
}

// Calls visit(weights in units of 1/steps) for every composition of `steps`
// into `parts` positive integers.
template <class F>
void compositions(int steps, std::size_t parts, std::vector<int>& current, F&& visit)
{
    if (parts == 1) {
        current.push_back(steps);
        visit(current);
        current.pop_back();
        return;
    }
    for (int first = 1; first <= steps - static_cast<int>(parts) + 1; ++first) {
        current.push_back(first);
        compositions(steps - first, parts - 1, current, visit);
        current.pop_back();
    }
}

template <class F>
void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& current, F&& visit)
{
    if (current.size() == k) {
        visit(current);
        return;
    }
    for (std::size_t i = start; i + (k - current.size()) <= n; ++i) {
        current.push_back(i);
        subsets(n, k, i + 1, current, visit);
        current.pop_back();
    }
}

}  // namespace

FiniteChannel::FiniteChannel(std::vector<std::vector<double>> matrix) : matrix_(std::move(matrix))
{
    if (matrix_.empty() || matrix_.front().empty()) throw ArgumentError("finite channel: empty matrix");
    const std::size_t cols = matrix_.front().size();
    for (std::size_t x = 0; x < matrix_.size(); ++x) {
        const auto& row = matrix_[x];
        if (row.size() != cols) throw ArgumentError("finite channel: row " + std::to_string(x) + " has a different length");
        double sum = 0.0;
        for (double w : row) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw ArgumentError("finite channel: row " + std::to_string(x) + " has a negative or non-finite entry");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ArgumentError("finite channel: row " + std::to_string(x) + " sums to " + std::to_string(sum));
    }
}

FiniteCapacity classic_capacity_iteration(const FiniteChannel& channel, int iters, double tol)
{
    const std::size_t n = channel.inputs();
    std::vector<double> p(n, 1.0 / static_cast<double>(n));
    FiniteCapacity out;
    for (int it = 0;; ++it) {
        const auto q = output_law(channel, p);
        const auto d = row_divergences(channel, q);
        double lower = 0.0;
        for (std::size_t x = 0; x < n; ++x) lower += p[x] * d[x];
        const double upper = *std::max_element(d.begin(), d.end());
        out.bits = lower;
        out.upper_bits = upper;
        out.iterations = it;
        if (upper - lower <= tol || it >= iters) break;
        double z = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            p[x] *= std::exp2(d[x] - upper);
            z += p[x];
        }
        for (double& w : p) w /= z;
    }
    out.input = std::move(p);
    return out;
}

double awgn_closed_form(double snr)
{
    if (!(snr > 0.0) || !std::isfinite(snr)) throw ArgumentError("awgn closed form: snr must be > 0");
    return 0.5 * std::log2(1.0 + snr);
}

EmbeddedFiniteKernel::EmbeddedFiniteKernel(FiniteChannel channel) : channel_(std::move(channel)), bump_std_(1e-2) {}

std::size_t EmbeddedFiniteKernel::nearest_input(double x) const
{
    const double last = static_cast<double>(channel_.inputs() - 1);
    return static_cast<std::size_t>(std::lround(std::clamp(x, 0.0, last)));
}

double EmbeddedFiniteKernel::density(double y, double x, double) const
{
    const std::size_t i = nearest_input(x);
    const double var = bump_std_ * bump_std_;
    double f = 0.0;
    for (std::size_t j = 0; j < channel_.outputs(); ++j) {
        const double w = channel_(i, j);
        if (w > 0.0) f += w * gaussian_pdf(y, static_cast<double>(j), var);
    }
    return f;
}

Interval EmbeddedFiniteKernel::span(double, double, double tail_sigmas) const
{
    const double pad = tail_sigmas * bump_std_;
    return {-pad, static_cast<double>(channel_.outputs() - 1) + pad};
}

EmbeddedChannel embed_finite_channel(const FiniteChannel& channel)
{
    EmbeddedChannel out;
    out.kernel = std::make_shared<const EmbeddedFiniteKernel>(channel);
    out.state = StateModel::point(0.0);
    for (std::size_t i = 0; i < channel.inputs(); ++i) out.inputs.push_back(static_cast<double>(i));
    return out;
}

Problem embedded_problem(const EmbeddedChannel& embedded)
{
    return Problem{marginalize(embedded.kernel, make_side_info(SideInfoKind::none, embedded.state)), ConstraintSpec{},
                   InputDomain::finite(embedded.inputs)};
}

SmallSupportResult exhaustive_small_support(const Problem& problem, std::size_t k_max, std::span<const double> grid,
                                            const OutputSchemes& schemes)
{
    if (k_max < 1 || k_max > 3) throw ArgumentError("exhaustive search: k_max must lie in [1, 3]");
    if (grid.empty() || grid.size() > 41) throw ArgumentError("exhaustive search: grid must hold 1 to 41 points");
    const auto& ch = problem.channel;
    if (schemes.size() != ch.side_info_count())
        throw ArgumentError("exhaustive search: schemes do not match the channel's side information");
    for (double x : grid)
        if (!problem.domain.contains(x, 1e-9))
            throw ArgumentError("exhaustive search: grid point " + std::to_string(x) + " lies outside the domain");

    const std::size_t n = grid.size();
    // Likelihood tables and Σ w f ln f per grid point, so each candidate only
    // needs its output mixture.
    std::vector<std::vector<double>> F(schemes.size());
    std::vector<double> negentropy(n, 0.0);
    for (std::size_t v = 0; v < schemes.size(); ++v) {
        const auto& s = schemes[v];
        F[v].resize(n * s.size());
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < s.size(); ++k) {
                const double f = ch.density(s.nodes[k], grid[j], v);
                F[v][j * s.size() + k] = f;
                if (f > 0.0) acc += s.weights[k] * f * std::log(f);
            }
            negentropy[j] += ch.r(v) * acc;
        }
    }
    const auto& spec = problem.constraints;

    constexpr int kSteps = 20;
    SmallSupportResult best;
    best.bits = -std::numeric_limits<double>::infinity();
    bool found = false;
    std::vector<double> q;
    std::vector<std::size_t> support;
    std::vector<int> parts;

    for (std::size_t k = 1; k <= k_max; ++k) {
        subsets(n, k, 0, support, [&](const std::vector<std::size_t>& idx) {
            compositions(kSteps, k, parts, [&](const std::vector<int>& units) {
                std::vector<double> p(k);
                for (std::size_t a = 0; a < k; ++a) p[a] = units[a] / static_cast<double>(kSteps);
                for (std::size_t i = 0; i < spec.size(); ++i) {
                    double m = 0.0;
                    for (std::size_t a = 0; a < k; ++a) m += p[a] * spec.function(i)(grid[idx[a]]);
                    if (m > spec.bound(i) + 1e-12) return;
                }
                ++best.candidates;
                double nats = 0.0;
                for (std::size_t v = 0; v < schemes.size(); ++v) {
                    const auto& s = schemes[v];
                    const std::size_t K = s.size();
                    q.assign(K, 0.0);
                    for (std::size_t a = 0; a < k; ++a) {
                        const double* row = F[v].data() + idx[a] * K;
                        for (std::size_t t = 0; t < K; ++t) q[t] += p[a] * row[t];
                    }
                    double cross = 0.0;
                    for (std::size_t t = 0; t < K; ++t)
                        if (q[t] > 0.0) cross += s.weights[t] * q[t] * std::log(q[t]);
                    nats -= ch.r(v) * cross;
                }
                for (std::size_t a = 0; a < k; ++a) nats += p[a] * negentropy[idx[a]];
                const double bits = nats / std::numbers::ln2;
                if (!found || bits > best.bits) {
                    found = true;
                    best.bits = bits;
                    std::vector<double> x(k);
                    for (std::size_t a = 0; a < k; ++a) x[a] = grid[idx[a]];
                    best.measure = AtomicMeasure::normalized(std::move(x), std::move(p));
                }
            });
        });
    }
    if (!found) throw OracleError("exhaustive search: no candidate satisfies the constraints");
    return best;
}

}  // namespace capax
