#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "capax/channel.hpp"
#include "capax/errors.hpp"
#include "capax/quadrature.hpp"

using namespace capax;

namespace {

double normal_pdf(double y, double mean, double sd)
{
    const double z = (y - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double mass(const MarginalChannel& ch, double x, std::size_t v)
{
    const Interval s = ch.span(x, v, 8.0);
    const QuadratureScheme q = simpson_scheme(s.lo, s.hi, 1025);
    return integrate([&](double y) { return ch.density(y, x, v); }, q);
}

}  // namespace

TEST_CASE("awgn kernel")
{
    const auto k = make_awgn(1.0);
    CHECK(std::abs(k.kernel->density(0.0, 0.0, 0.0) - 0.3989423) < 1e-7);
    const MarginalChannel ch = marginalize(k.kernel, make_side_info(SideInfoKind::none, k.state));
    for (double x : {-3.0, 0.0, 3.0}) CHECK(std::abs(mass(ch, x, 0) - 1.0) <= 1e-6);
    for (double y : {-2.0, 0.1, 1.7})
        for (double x : {-1.0, 0.4})
            CHECK(k.kernel->density(y, x, 0.0) == doctest::Approx(k.kernel->density(-y, -x, 0.0)).epsilon(1e-15));
    CHECK(k.kernel->reflection_symmetric());
    CHECK_THROWS_AS(make_awgn(0.0), ArgumentError);
    CHECK_THROWS_AS(make_awgn(-1.0), ArgumentError);
}

TEST_CASE("analytic density derivatives match central differences")
{
    const auto awgn = make_awgn(0.7);
    const auto fade = make_finite_state_fading({0.5, 1.5}, {0.5, 0.5}, 1.0);
    const auto ray = make_rayleigh_surrogate(1.0, 1.0);
    const double h = 1e-5;
    for (const ChannelKernel* k : {awgn.kernel.get(), fade.kernel.get(), ray.kernel.get()}) {
        for (double y : {-1.3, 0.2, 2.1})
            for (double x : {-0.8, 0.3, 1.9}) {
                const double fd = (k->density(y, x + h, 1.5) - k->density(y, x - h, 1.5)) / (2.0 * h);
                CHECK(k->density_dx(y, x, 1.5) == doctest::Approx(fd).epsilon(1e-6));
            }
    }
}

TEST_CASE("finite-state fading")
{
    const auto single = make_finite_state_fading({1.0}, {1.0}, 1.0);
    const auto awgn = make_awgn(1.0);
    for (double y : {-1.0, 0.5})
        for (double x : {-2.0, 0.0, 1.0})
            CHECK(single.kernel->density(y, x, 1.0) == doctest::Approx(awgn.kernel->density(y, x, 0.0)));

    const auto fk = make_finite_state_fading({0.5, 1.5}, {0.5, 0.5}, 1.0);
    const MarginalChannel full = marginalize(fk.kernel, make_side_info(SideInfoKind::full, fk.state));
    REQUIRE(full.side_info_count() == 2);
    // Second symbol carries gain 1.5.
    for (double y : {-0.5, 1.0, 2.5}) CHECK(full.density(y, 1.0, 1) == doctest::Approx(normal_pdf(y, 1.5, 1.0)));

    const MarginalChannel none = marginalize(fk.kernel, make_side_info(SideInfoKind::none, fk.state));
    REQUIRE(none.side_info_count() == 1);
    CHECK(std::abs(none.density(0.0, 1.0, 0) - 0.24079) < 1e-5);
    const double direct = 0.5 * normal_pdf(0.0, 0.5, 1.0) + 0.5 * normal_pdf(0.0, 1.5, 1.0);
    CHECK(none.density(0.0, 1.0, 0) == doctest::Approx(direct).epsilon(1e-14));
    for (double y : {-2.0, 0.3, 1.8})
        for (double x : {-1.0, 2.0})
            CHECK(none.density(y, x, 0) ==
                  doctest::Approx(0.5 * normal_pdf(y, 0.5 * x, 1.0) + 0.5 * normal_pdf(y, 1.5 * x, 1.0)));

    CHECK_THROWS_AS(make_finite_state_fading({0.5, 1.5}, {1.0}, 1.0), ArgumentError);
    CHECK_THROWS_AS(make_finite_state_fading({0.5}, {1.0}, 0.0), ArgumentError);
}

TEST_CASE("rayleigh surrogate")
{
    const auto k = make_rayleigh_surrogate(1.0, 1.0);
    for (double y : {-1.0, 0.0, 2.0}) CHECK(k.kernel->density(y, 0.0, 0.0) == doctest::Approx(normal_pdf(y, 0.0, 1.0)));
    for (double y : {-1.5, 0.4})
        for (double x : {0.3, 2.0}) CHECK(k.kernel->density(y, x, 0.0) == k.kernel->density(y, -x, 0.0));
    const auto* ray = dynamic_cast<const RayleighSurrogateKernel*>(k.kernel.get());
    REQUIRE(ray != nullptr);
    CHECK(ray->variance(1.0) == doctest::Approx(2.0));
    CHECK(k.kernel->density(0.0, 1.0, 0.0) == doctest::Approx(normal_pdf(0.0, 0.0, std::sqrt(2.0))));
    CHECK_THROWS_AS(make_rayleigh_surrogate(0.0, 1.0), ArgumentError);
    CHECK_THROWS_AS(make_rayleigh_surrogate(1.0, -1.0), ArgumentError);
}

TEST_CASE("side information models")
{
    const StateModel two{{0.5, 1.5}, {0.3, 0.7}};
    const SideInfoModel full = make_side_info(SideInfoKind::full, two);
    REQUIRE(full.size() == 2);
    for (std::size_t v = 0; v < 2; ++v) {
        CHECK(full.q_given_v[v].size() == 1);
        CHECK(full.q_given_v[v].values[0] == two.values[v]);
        CHECK(full.r_weights[v] == two.weights[v]);
    }

    const SideInfoModel none = make_side_info(SideInfoKind::none, two);
    const SideInfoModel one_bin = make_side_info(SideInfoKind::quantized, two, 1);
    REQUIRE(one_bin.size() == 1);
    CHECK(one_bin.r_weights[0] == doctest::Approx(1.0));
    CHECK(one_bin.q_given_v[0].values == none.q_given_v[0].values);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(one_bin.q_given_v[0].weights[i] == doctest::Approx(none.q_given_v[0].weights[i]));

    const SideInfoModel finest = make_side_info(SideInfoKind::quantized, two, 2);
    REQUIRE(finest.size() == 2);
    for (std::size_t v = 0; v < 2; ++v) {
        CHECK(finest.r_weights[v] == doctest::Approx(full.r_weights[v]));
        CHECK(finest.q_given_v[v].values == full.q_given_v[v].values);
    }

    CHECK_THROWS_AS(make_side_info(SideInfoKind::quantized, two, 3), ConfigError);
    CHECK_THROWS_AS(make_side_info(SideInfoKind::none, StateModel{}), ConfigError);
    CHECK_THROWS_AS(make_side_info(SideInfoKind::none, StateModel{{1.0, 2.0}, {0.5, 0.6}}), ConfigError);
}

TEST_CASE("marginalize rejects empty side information")
{
    const auto k = make_awgn(1.0);
    CHECK_THROWS_AS(marginalize(k.kernel, SideInfoModel{}), ConfigError);
}

TEST_CASE("property: normalization of every built-in channel on a grid")
{
    const auto awgn = make_awgn(0.5);
    const auto fade = make_finite_state_fading({0.2, 0.9, 1.7}, {0.2, 0.5, 0.3}, 0.8);
    const auto ray = make_rayleigh_surrogate(1.3, 0.6);
    std::vector<MarginalChannel> channels{
        marginalize(awgn.kernel, make_side_info(SideInfoKind::none, awgn.state)),
        marginalize(fade.kernel, make_side_info(SideInfoKind::none, fade.state)),
        marginalize(fade.kernel, make_side_info(SideInfoKind::full, fade.state)),
        marginalize(fade.kernel, make_side_info(SideInfoKind::quantized, fade.state, 2)),
        marginalize(ray.kernel, make_side_info(SideInfoKind::none, ray.state)),
    };
    for (const auto& ch : channels)
        for (std::size_t v = 0; v < ch.side_info_count(); ++v)
            for (double x = -3.0; x <= 3.0; x += 0.25) CHECK(std::abs(mass(ch, x, v) - 1.0) <= 1e-6);
}

TEST_CASE("property: marginalization is linear in the state law")
{
    const auto fk = make_finite_state_fading({0.5, 1.5}, {0.5, 0.5}, 1.0);
    const double lambda = 0.35;
    auto single_law = [&](StateModel q) {
        SideInfoModel s;
        s.r_weights = {1.0};
        s.q_given_v = {std::move(q)};
        s.labels = {"v"};
        return marginalize(fk.kernel, s);
    };
    const MarginalChannel first = single_law(StateModel{{0.5, 1.5}, {0.8, 0.2}});
    const MarginalChannel second = single_law(StateModel{{0.5, 1.5}, {0.1, 0.9}});
    const MarginalChannel mixed = single_law(StateModel{{0.5, 1.5}, {lambda * 0.8 + (1 - lambda) * 0.1,
                                                                      lambda * 0.2 + (1 - lambda) * 0.9}});
    for (double y : {-2.0, -0.1, 0.9, 3.0})
        for (double x : {-1.5, 0.0, 2.2})
            CHECK(mixed.density(y, x, 0) ==
                  doctest::Approx(lambda * first.density(y, x, 0) + (1 - lambda) * second.density(y, x, 0))
                      .epsilon(1e-14));
}

TEST_CASE("property: quantized side information coarsens full CSI")
{
    const StateModel st{{0.2, 0.6, 1.1, 1.9}, {0.1, 0.4, 0.3, 0.2}};
    const SideInfoModel full = make_side_info(SideInfoKind::full, st);
    const SideInfoModel quant = make_side_info(SideInfoKind::quantized, st, 2);
    REQUIRE(quant.size() == 2);
    for (std::size_t c = 0; c < quant.size(); ++c) {
        const StateModel& cell = quant.q_given_v[c];
        double cell_mass = 0.0;
        for (std::size_t i = 0; i < cell.size(); ++i) {
            std::size_t fv = 0;
            while (full.q_given_v[fv].values[0] != cell.values[i]) ++fv;
            cell_mass += full.r_weights[fv];
        }
        CHECK(cell_mass == doctest::Approx(quant.r_weights[c]).epsilon(1e-14));
        for (std::size_t i = 0; i < cell.size(); ++i) {
            std::size_t fv = 0;
            while (full.q_given_v[fv].values[0] != cell.values[i]) ++fv;
            CHECK(full.r_weights[fv] / cell_mass == doctest::Approx(cell.weights[i]).epsilon(1e-14));
        }
    }
}
