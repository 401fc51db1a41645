#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "bootlab/intervals.hpp"

using namespace bootlab;
using Catch::Approx;

namespace {

StatisticSpec spec(StatKind k, int p = 1) {
    StatisticSpec s;
    s.kind = k;
    s.p = p;
    return s;
}

Dataset normal_data(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng r({seed, 0});
    std::vector<double> v(n * d);
    for (auto& x : v) x = r.normal();
    return Dataset(n, d, v);
}

Dataset dyadic_data(std::size_t n, std::uint64_t seed) {
    Rng r({seed, 1});
    std::vector<double> v(n);
    for (auto& x : v) x = std::ldexp(double(r.below(1 << 10)), -8) - 2.0;
    return Dataset::column(v);
}

CiRequest request(StatisticSpec s, Dataset x, CiMethod::Kind k, std::size_t B = 500) {
    CiMethod m;
    m.kind = k;
    return CiRequest{std::move(s), std::move(x), B, 0.05, m, {2024, 1}};
}

// Standard normal quantile by bisection on the CDF.
double normal_quantile(double p) {
    double lo = -10, hi = 10;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("bootstrap law examples", "[intervals]") {
    const Dataset flat = Dataset::column(std::vector<double>(20, 1.5));
    const auto pm = bootstrap_law(spec(StatKind::ScaledMeanPower, 2), flat, ResamplePlan::empirical(50), {1, 1});
    for (double v : pm.law.values()) CHECK(v == 0.0);

    const auto one = bootstrap_law(spec(StatKind::ScaledMin), normal_data(10, 1, 2), ResamplePlan::empirical(1), {1, 2});
    CHECK(one.law.values() == std::vector<double>{0.0});

    const Dataset x = normal_data(100, 1, 3);
    const auto c = bootstrap_law(spec(StatKind::ScaledMeanPower), x, ResamplePlan::centered({0.4}, 4000), {1, 3});
    double s2 = 0;
    for (double v : c.law.values()) s2 += v * v;
    const double se = std::sqrt(s2 / 4000 / 4000);
    CHECK(std::fabs(c.mean - 10.0 * 0.4) <= 3 * se);
    CHECK(std::fabs(c.law.quantile(0.1) + c.law.quantile(0.9)) < 0.15);
}

TEST_CASE("column-sum fast path agrees with materialised resamples", "[intervals]") {
    const Dataset x = normal_data(50, 4, 4);
    auto mx = spec(StatKind::MaxCoordMean);
    mx.beta = 2.0;
    const auto fast = bootstrap_values(mx, x, ResamplePlan::centered({0.1, 0.2, 0.3, 0.4}, 130), 77);
    for (std::size_t b = 0; b < 130; ++b)
        CHECK(fast[b] == Approx(eval(mx, resample_centered(x, {0.1, 0.2, 0.3, 0.4}, {77, b}))).epsilon(1e-12));
}

TEST_CASE("ci_plain is the quantile reflection interval", "[intervals]") {
    const auto req = request(spec(StatKind::ScaledMeanPower, 2), normal_data(200, 1, 5), CiMethod::Kind::PlainQuantile);
    const CiResult r = ci_plain(req);
    const auto law = bootstrap_law(req.statistic, req.data, ResamplePlan::empirical(req.B), req.seed);
    CHECK(r.lo == r.center - law.law.quantile(0.975));
    CHECK(r.hi == r.center - law.law.quantile(0.025));
    CHECK(r.replicates == law.raw);

    const auto flat = request(spec(StatKind::ScaledMeanPower), Dataset::column(std::vector<double>(30, 2.0)),
                              CiMethod::Kind::PlainQuantile);
    const CiResult z = ci_plain(flat);
    // Replicate sums may round differently from the direct sum.
    CHECK(z.lo == z.hi);
    CHECK(z.lo == Approx(z.center).epsilon(1e-12));
    CHECK_THROWS_AS(ci_plain(request(spec(StatKind::ScaledMin), normal_data(10, 1, 1), CiMethod::Kind::PlainQuantile, 50)),
                    Error);
}

TEST_CASE("centered interval with known mean equal to the sample mean is the plain interval", "[intervals]") {
    const Dataset x = dyadic_data(64, 6);
    for (auto k : {StatKind::ScaledMeanPower, StatKind::ScaledMin, StatKind::ProductStatistic}) {
        auto c = request(spec(k, 2), x, CiMethod::Kind::Centered);
        c.method.known_mean = column_mean(x);
        const CiResult a = ci_centered(c), b = ci_plain(request(spec(k, 2), x, CiMethod::Kind::PlainQuantile));
        CHECK(a.lo == b.lo);
        CHECK(a.hi == b.hi);
    }
    auto bad = request(spec(StatKind::ScaledMeanPower), x, CiMethod::Kind::Centered);
    bad.method.known_mean = {0.0, 0.0};
    CHECK_THROWS_AS(ci_centered(bad), Error);
}

TEST_CASE("paired-difference statistic has identical centered and plain laws", "[intervals]") {
    const Dataset x = dyadic_data(64, 7);
    const auto s = spec(StatKind::PairedDiffSq);
    const auto plain = bootstrap_law(s, x, ResamplePlan::empirical(200), {3, 3});
    const auto cent = bootstrap_law(s, x, ResamplePlan::centered({0.75}, 200), {3, 3});
    CHECK(plain.raw == cent.raw);
}

TEST_CASE("anchored centered interval is symmetric about g(X)", "[intervals]") {
    auto req = request(spec(StatKind::ScaledMeanPower), normal_data(100, 1, 8), CiMethod::Kind::Centered);
    req.method.known_mean = {0.0};
    req.method.anchor = 0.0;
    const CiResult r = ci_centered(req);
    CHECK(r.hi - r.center == Approx(r.center - r.lo));
    CHECK(r.t_star == abs_quantile(r.replicates, 0.0, 0.05));
}

TEST_CASE("corrected interval: degenerate Holder term and nesting", "[intervals]") {
    const Dataset x = normal_data(300, 1, 9);
    auto req = request(spec(StatKind::ScaledMeanPower, 2), x, CiMethod::Kind::Corrected);
    req.method.holder_C = 0.0;
    const CiResult r0 = ci_corrected(req);
    CHECK(r0.half_width() == Approx(r0.t_b));
    CHECK(r0.t_g == 0.0);
    req.method.holder_C = 1.0;
    req.method.holder_alpha = 2.0;
    const CiResult r1 = ci_corrected(req);
    CHECK(r1.t_b == r0.t_b);
    CHECK(r1.t_g > 0.0);
    const CiResult p = ci_plain(request(spec(StatKind::ScaledMeanPower, 2), x, CiMethod::Kind::PlainQuantile));
    CHECK(r0.half_width() >= p.half_width());
    CHECK(r1.half_width() >= p.half_width());
}

TEST_CASE("gaussian max quantile", "[intervals]") {
    CHECK(normal_quantile(0.975) == Approx(1.95996).margin(1e-4));

    const Dataset unit = Dataset::column({1.0, -1.0});  // sample variance 2
    CHECK(gaussian_max_quantile(unit, 0.05, 400000, {2, 2}) / std::sqrt(2.0) == Approx(normal_quantile(0.975)).margin(0.01));

    // Rows +-sqrt(3/2) e_k have sample covariance exactly the identity (n - 1 denominator).
    const double a = std::sqrt(1.5);

    const Dataset id2(4, 2, {a, 0, -a, 0, 0, a, 0, -a});
    const double q = gaussian_max_quantile(id2, 0.05, 400000, {3, 3});
    CHECK(q == Approx(normal_quantile((1 + std::sqrt(0.95)) / 2)).margin(0.02));
    std::mt19937_64 eng(12345);
    std::normal_distribution<double> nd;
    std::vector<double> mx(1000000);
    for (auto& m : mx) m = std::max(std::fabs(nd(eng)), std::fabs(nd(eng)));
    std::nth_element(mx.begin(), mx.begin() + 950000, mx.end());
    CHECK(q == Approx(mx[950000]).margin(0.02));

    CHECK(gaussian_max_quantile(Dataset(3, 2, {1, 2, 1, 2, 1, 2}), 0.05, 1000, {4, 4}) == 0.0);
    const Dataset x = normal_data(100, 3, 10);
    CHECK(gaussian_max_quantile(x, 0.01, 5000, {5, 5}) >= gaussian_max_quantile(x, 0.1, 5000, {5, 5}));
    CHECK_THROWS_AS(gaussian_max_quantile(x, 0.05, 999, {5, 5}), Error);
}

TEST_CASE("shifted-sup interval reduces to a singleton and grows with the grid", "[intervals]") {
    const Dataset x = normal_data(200, 1, 11);
    auto req = request(spec(StatKind::ScaledMeanPower, 2), x, CiMethod::Kind::ShiftedSup);
    req.method.grid = make_offset_grid(1, 0.0, 41, {1, 1});
    REQUIRE(req.method.grid.size() == 1);
    const CiResult r0 = ci_shifted_sup(req);
    const auto raw = bootstrap_values(req.statistic, x, ResamplePlan::empirical(req.B), derive_root(2024, 1));
    double m = 0;
    for (double v : raw) m += v;
    CHECK(r0.t_star == abs_quantile(raw, m / double(raw.size()), 0.05));

    req.method.grid = make_offset_grid(1, 0.2, 5, {1, 1});
    const CiResult small = ci_shifted_sup(req);
    req.method.grid = make_offset_grid(1, 0.2, 9, {1, 1});  // contains the 5-point grid
    const CiResult big = ci_shifted_sup(req);
    CHECK(big.t_star >= small.t_star);
    CHECK(small.t_star >= r0.t_star);
    req.method.grid.clear();
    CHECK_THROWS_AS(ci_shifted_sup(req), Error);
}

TEST_CASE("robust interval with the sample mean reduces to the bootstrap", "[intervals]") {
    const Dataset x = dyadic_data(64, 12);
    auto req = request(spec(StatKind::ScaledMeanPower, 2), x, CiMethod::Kind::Robust);
    req.method.grid = {column_mean(x)};
    const CiResult r = ci_robust(req);
    const auto raw = bootstrap_values(req.statistic, x, ResamplePlan::empirical(req.B), derive_root(2024, 1));
    CHECK(r.replicates == raw);
    const double xb = column_mean(x)[0];
    req.method.grid = {{xb}, {xb + 0.1}, {xb - 0.1}};
    CHECK(ci_robust(req).t_star >= r.t_star);
}

TEST_CASE("offset grids", "[intervals]") {
    const auto g1 = make_offset_grid(1, 0.5, 41, {1, 1});
    REQUIRE(g1.size() == 41);
    CHECK(g1.front()[0] == -0.5);
    CHECK(g1.back()[0] == 0.5);
    CHECK(g1[20][0] == 0.0);
    const auto g3 = make_offset_grid(3, 0.5, 41, {1, 1});
    CHECK(g3.size() == 1 + 6 + 12);
    for (const auto& o : g3) {
        double n2 = 0;
        for (double v : o) n2 += v * v;
        CHECK(std::sqrt(n2) <= 0.5 + 1e-12);
    }
}

TEST_CASE("bootstrap p-values", "[intervals]") {
    const Dataset x = normal_data(30, 1, 13);
    const double p1 = pvalue_bootstrap(spec(StatKind::ScaledMeanPower), x, {0.0}, 1, {1, 1});
    CHECK((p1 == 0.5 || p1 == 1.0));
    const Dataset flat = Dataset::column(std::vector<double>(30, 1.0));
    CHECK(pvalue_bootstrap(spec(StatKind::ScaledMeanPower, 2), flat, {1.0}, 50, {1, 1}) == 1.0);
    CHECK(pvalue_from_values(10.0, {0.0, 1.0, -1.0}) == 0.25);
    CHECK(pvalue_from_values(0.0, {1.0, -1.0}) == 1.0);
}

TEST_CASE("identical requests give identical results", "[intervals]") {
    auto req = request(spec(StatKind::MaxCoordMean), normal_data(80, 5, 14), CiMethod::Kind::ShiftedSup);
    req.method.grid = make_offset_grid(5, 0.3, 1, {2, 2});
    const CiResult a = build_ci(req), b = build_ci(req);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    CHECK(a.replicates == b.replicates);
    CHECK(to_json(a) == to_json(b));
}
