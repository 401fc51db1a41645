#include <catch_amalgamated.hpp>

#include <cmath>

#include "bootlab/core.hpp"
#include "bootlab/metric.hpp"

using namespace bootlab;
using Catch::Approx;

namespace {

// h(x) = P(x - S in [a,b]), S a sum of three U(0,eps); innermost integral exact, two trapezoid levels.
double smoothed_oracle(double x, double a, double b, double eps, int N) {
    auto inner = [&](double t1, double t2) {
        const double lo = std::max(0.0, x - t1 - t2 - b), hi = std::min(eps, x - t1 - t2 - a);
        return std::max(0.0, hi - lo) / eps;
    };
    const double h = eps / N;
    double outer = 0.0;
    for (int i = 0; i <= N; ++i) {
        double mid = 0.0;
        for (int j = 0; j <= N; ++j) mid += (j == 0 || j == N ? 0.5 : 1.0) * inner(i * h, j * h);
        outer += (i == 0 || i == N ? 0.5 : 1.0) * mid * h / eps;
    }
    return outer * h / eps;
}

// CDF of the Irwin-Hall(3) law scaled to [0, 3 eps].
double ih3(double s, double eps) {
    const double u = s / eps;
    if (u <= 0) return 0;
    if (u >= 3) return 1;
    if (u <= 1) return u * u * u / 6;
    if (u <= 2) return (-2 * u * u * u + 9 * u * u - 9 * u + 3) / 6;
    return 1 - (3 - u) * (3 - u) * (3 - u) / 6;
}

EmpiricalLaw normal_law(std::size_t n, std::uint64_t seed, double shift = 0.0) {
    Rng r({seed, 0});
    std::vector<double> v(n);
    for (auto& x : v) x = r.normal() + shift;
    return EmpiricalLaw(v);
}

}  // namespace

TEST_CASE("empirical law quantile and cdf", "[metric]") {
    const EmpiricalLaw l({4, 1, 3, 2});
    CHECK(l.quantile(0.5) == 2);
    CHECK(l.quantile(0.51) == 3);
    CHECK(l.quantile(1.0) == 4);
    CHECK(l.quantile(0.0) == 1);
    CHECK(l.quantile(0.3) == 2);
    CHECK(l.cdf(2.5) == 0.5);
    CHECK(l.cdf(4) == 1.0);
    CHECK(l.mean() == 2.5);
    CHECK(l.centered().mean() == 0.0);
    CHECK(l.shifted(1).quantile(0.5) == 3);
}

TEST_CASE("smoothed indicator examples", "[metric]") {
    CHECK(smoothed_indicator(0.5, 0, 1, 0.01) == 1.0);
    CHECK(smoothed_indicator(-1, 0, 1, 0.01) == 0.0);
    CHECK(smoothed_indicator(0.05, 0, 1, 0.1) == Approx(smoothed_oracle(0.05, 0, 1, 0.1, 4000)).margin(1e-6));
    for (double x : {0.02, 0.13, 0.21, 0.29, 0.95, 1.1, 1.25})
        CHECK(smoothed_indicator(x, 0, 1, 0.1) == Approx(smoothed_oracle(x, 0, 1, 0.1, 1000)).margin(1e-5));
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(smoothed_indicator(0.0, -inf, 0.0, 0.1) == 1.0);
    CHECK(smoothed_indicator(0.3, -inf, 0.0, 0.1) == 0.0);
}

TEST_CASE("smoothed indicator derivatives match finite differences", "[metric]") {
    const double e = 0.2, h = 1e-5;
    for (double x : {0.05, 0.17, 0.33, 0.52, 1.07}) {
        const double fd = (smoothed_indicator(x + h, 0, 1, e) - smoothed_indicator(x - h, 0, 1, e)) / (2 * h);
        CHECK(smoothed_indicator_derivative(x, 0, 1, e, 1) == Approx(fd).margin(1e-6));
        const double fd2 = (smoothed_indicator_derivative(x + h, 0, 1, e, 1) -
                            smoothed_indicator_derivative(x - h, 0, 1, e, 1)) / (2 * h);
        CHECK(smoothed_indicator_derivative(x, 0, 1, e, 2) == Approx(fd2).margin(1e-4));
    }
}

TEST_CASE("default dictionary entries lie in the smooth test class", "[metric]") {
    const auto a = normal_law(500, 1), b = normal_law(500, 2, 0.5);
    const TestDictionary d = default_dictionary(a, b);
    REQUIRE(d.entries.size() == 3 * 17 + 8);
    double worst = 0.0;
    for (const auto& e : d.entries)
        for (int i = 0; i <= 10000; ++i) {
            const double x = -6.0 + 12.0 * i / 10000;
            for (int k = 1; k <= 3; ++k) worst = std::max(worst, std::fabs(e.derivative(x, d.center, k)));
        }
    CHECK(worst <= 1.0 + 1e-6);
}

TEST_CASE("estimate_df basic properties", "[metric]") {
    const auto a = normal_law(400, 3), b = normal_law(300, 4, 0.3);
    CHECK(estimate_df(a, a) == 0.0);
    CHECK(estimate_df(EmpiricalLaw({0.0}), EmpiricalLaw({0.0})) == 0.0);
    CHECK(estimate_df(a, b) == estimate_df(b, a));
    CHECK(estimate_df(a, b) > 0.0);

    TestDictionary d = default_dictionary(a, b);
    TestDictionary small = d;
    small.entries.resize(10);
    CHECK(estimate_df(a, b, small) <= estimate_df(a, b, d));
    CHECK_THROWS_AS(estimate_df(a, b, TestDictionary{}), Error);
}

TEST_CASE("estimate_df is exactly translation equivariant on dyadic laws", "[metric]") {
    Rng r({5, 5});
    std::vector<double> va(256), vb(256);
    for (auto& x : va) x = std::ldexp(double(r.below(4096)), -8);
    for (auto& x : vb) x = std::ldexp(double(r.below(4096)), -8) + 1.0;
    const EmpiricalLaw a(va), b(vb);
    const double base = estimate_df(a, b);
    for (double c : {0.25, -7.5, 100.0}) CHECK(estimate_df(a.shifted(c), b.shifted(c)) == base);
}

TEST_CASE("estimate_df for two point masses matches a direct recomputation", "[metric]") {
    const EmpiricalLaw a({0.0}), b({3.0});
    const double df = estimate_df(a, b);
    // Pooled center 1.5, relative points -1.5 and 1.5, IQR 3, SD 1.5.
    double oracle = 0.0;
    for (double f : {0.05, 0.15, 0.5}) {
        const double eps = 3 * f;
        const double s = 1.0 / std::max({0.75 / eps, 1.0 / (eps * eps), 2.0 / (eps * eps * eps)});
        for (int k = 2; k <= 18; ++k) {
            const double q = k * 5 <= 50 ? -1.5 : 1.5;
            oracle = std::max(oracle, s * std::fabs(ih3(-1.5 - q, eps) - ih3(1.5 - q, eps)));
        }
    }
    for (double w0 : {0.5, 1.0, 2.0, 4.0})
        for (double phi : {0.0, M_PI / 2}) {
            const double w = w0 / 1.5, A = 1.0 / std::max({w, w * w, w * w * w});
            oracle = std::max(oracle, A * std::fabs(std::sin(-1.5 * w + phi) - std::sin(1.5 * w + phi)));
        }
    CHECK(df == Approx(oracle).epsilon(1e-12));
    CHECK(df > 0.0);

    // A finer grid over the same families can only find larger gaps.
    double fine = 0.0;
    for (int i = 1; i <= 400; ++i) {
        const double w = 4.0 / 1.5 * i / 400, A = 1.0 / std::max({w, w * w, w * w * w});
        for (int j = 0; j < 64; ++j) {
            const double phi = 2 * M_PI * j / 64;
            fine = std::max(fine, A * std::fabs(std::sin(-1.5 * w + phi) - std::sin(1.5 * w + phi)));
        }
    }
    CHECK(df <= fine + 1e-12);
}

TEST_CASE("ks distance examples", "[metric]") {
    const auto a = normal_law(5000, 7), b = normal_law(5000, 8);
    CHECK(ks_distance(a, a) == 0.0);
    CHECK(ks_distance(EmpiricalLaw({0, 1}), EmpiricalLaw({2, 3})) == 1.0);
    CHECK(ks_distance(a, b) <= 0.04);
    CHECK(ks_distance(EmpiricalLaw({0, 1}), EmpiricalLaw({1, 2})) == 0.5);
}

TEST_CASE("ks to uniform", "[metric]") {
    std::vector<double> u;
    for (int i = 0; i < 100; ++i) u.push_back((i + 0.5) / 100);
    CHECK(ks_uniform(EmpiricalLaw(u)) == Approx(0.005));
    CHECK(ks_uniform(EmpiricalLaw({1.0, 1.0})) == Approx(1.0));
}

TEST_CASE("dictionary json lists every entry", "[metric]") {
    const auto a = normal_law(50, 9), b = normal_law(50, 10);
    const auto j = to_json(default_dictionary(a, b));
    CHECK(j.at("entries").size() == 59);
    CHECK(j.at("entries")[0].at("interval")[0] == "-inf");
}
