#include <catch_amalgamated.hpp>

#include <cmath>

#include "bootlab/diagnostics.hpp"

using namespace bootlab;
using Catch::Approx;

namespace {

StatisticSpec mean_power(int p) {
    StatisticSpec s;
    s.kind = StatKind::ScaledMeanPower;
    s.p = p;
    return s;
}

}  // namespace

TEST_CASE("first-order stability of the scaled mean is ||X_1||_3 / sqrt(n)", "[diagnostics]") {
    DistributionSpec normal;
    const auto gen = generator_for(normal);
    const double abs3 = std::cbrt(2.0 * std::sqrt(2.0 / M_PI));  // (E|Z|^3)^(1/3)
    for (std::size_t n : {25, 400}) {
        const double l3 = first_order_stability(mean_power(1), gen, n, 2000, {17, n});
        CHECK(l3 == Approx(abs3 / std::sqrt(double(n))).epsilon(0.1));
    }
}

TEST_CASE("first-order stability is zero when row 1 cannot matter", "[diagnostics]") {
    // Every generated row is already zero, so zeroing row 1 changes nothing.
    const DataGenerator zeros = [](std::size_t n, RngSeed) { return Dataset(n, 1, std::vector<double>(n, 0.0)); };
    CHECK(first_order_stability(mean_power(1), zeros, 50, 100, {1, 1}) == 0.0);
    CHECK(first_order_stability(mean_power(3), zeros, 50, 100, {1, 1}) == 0.0);
}

TEST_CASE("first-order stability rejects too few trials", "[diagnostics]") {
    DistributionSpec normal;
    CHECK_THROWS_AS(first_order_stability(mean_power(1), generator_for(normal), 10, 99, {1, 1}), Error);
}

TEST_CASE("rate exponent fit recovers exact power laws", "[diagnostics]") {
    const std::vector<double> ns{100, 200, 400, 800};
    std::vector<double> v;
    for (double n : ns) v.push_back(3.0 * std::pow(n, -1.0 / 3.0));
    CHECK(fit_rate_exponent(ns, v) == Approx(-1.0 / 3.0).margin(1e-12));
    v.clear();
    for (double n : ns) v.push_back(0.5 * n);
    CHECK(fit_rate_exponent(ns, v) == Approx(1.0).margin(1e-12));
    CHECK_THROWS_AS(fit_rate_exponent({100}, {1.0}), Error);
    CHECK_THROWS_AS(fit_rate_exponent({100, 200}, {1.0, 0.0}), Error);
}

TEST_CASE("conditional mean gap of the scaled mean is within sampling error", "[diagnostics]") {
    DistributionSpec normal;
    const Dataset x = generate(normal, 200, {55, 0});
    const Estimate g = conditional_mean_gap_detail(mean_power(1), x, normal, 10000, {56, 0});
    CHECK(g.se > 0.0);
    CHECK(g.value <= 3.0 * g.se);
}

TEST_CASE("perturbation sensitivity of the paired squared difference is exactly zero", "[diagnostics]") {
    DistributionSpec lat;
    lat.d = 2;
    lat.lattice_bits = 20;
    StatisticSpec pd;
    pd.kind = StatKind::PairedDiffSq;
    const Estimate e = uniform_perturbation_sensitivity_detail(pd, generator_for(lat), 100, 1.0, 11, 50, {3, 3}, 20);
    CHECK(e.value == 0.0);
    CHECK(e.se == 0.0);
}

TEST_CASE("perturbation sensitivity basics", "[diagnostics]") {
    DistributionSpec normal;
    const auto gen = generator_for(normal);
    CHECK(uniform_perturbation_sensitivity(mean_power(2), gen, 100, 0.0, 5, 50, {4, 4}, 20) == 0.0);
    CHECK(uniform_perturbation_sensitivity(mean_power(2), gen, 100, 1.0, 11, 200, {4, 4}, 50) > 0.0);
    CHECK_THROWS_AS(uniform_perturbation_sensitivity(mean_power(2), gen, 100, 1.0, 0, 10, {4, 4}), Error);
    CHECK_THROWS_AS(uniform_perturbation_sensitivity(mean_power(2), gen, 100, 1.0, 5, 10, {4, 4}, 0), Error);
}
