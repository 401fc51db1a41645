#include "bootlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "bootlab/intervals.hpp"

namespace bootlab {

namespace {

Estimate mean_se(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= double(v.size());
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    const double var = v.size() > 1 ? s2 / double(v.size() - 1) : 0.0;
    return {m, std::sqrt(var / double(v.size()))};
}

// Offsets are snapped to multiples of 2^-24 so translating lattice-valued data is exact.
double snap(double x) { return std::nearbyint(std::ldexp(x, 24)) * std::ldexp(1.0, -24); }

}  // namespace

DataGenerator generator_for(const DistributionSpec& spec) {
    return [spec](std::size_t n, RngSeed seed) { return generate(spec, n, seed); };
}

double first_order_stability(const StatisticSpec& stat, const DataGenerator& gen, std::size_t n,
                             std::size_t trials, RngSeed seed) {
    if (trials < 100) throw Error("first_order_stability needs trials >= 100");
    double s = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const Dataset x = gen(n, {derive_root(seed.root, seed.stream, 1), t});
        std::vector<double> v(x.values());
        std::fill(v.begin(), v.begin() + std::ptrdiff_t(x.d()), 0.0);
        const double diff = eval(stat, x) - eval(stat, Dataset(x.n(), x.d(), std::move(v)));
        s += std::fabs(diff) * diff * diff;
    }
    return std::cbrt(s / double(trials));
}

double fit_rate_exponent(const std::vector<double>& ns, const std::vector<double>& values) {
    if (ns.size() != values.size() || ns.size() < 2) throw Error("rate fit needs >= 2 matched points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!(ns[i] > 0.0 && values[i] > 0.0)) throw Error("rate fit needs positive values");
        mx += std::log(ns[i]);
        my += std::log(values[i]);
    }
    mx /= double(ns.size());
    my /= double(ns.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double dx = std::log(ns[i]) - mx;
        sxy += dx * (std::log(values[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

Estimate conditional_mean_gap_detail(const StatisticSpec& stat, const Dataset& data,
                                     const DistributionSpec& dist, std::size_t B, RngSeed seed) {
    if (B < 2) throw Error("conditional_mean_gap needs B >= 2");
    const auto mu = dist.mean();
    if (mu.size() != data.d()) throw Error("distribution dimension does not match the data");
    const auto xbar = column_mean(data);
    std::vector<double> off(mu.size());
    for (std::size_t k = 0; k < off.size(); ++k) off[k] = xbar[k] - mu[k];

    const auto boot = bootstrap_values(stat, data, ResamplePlan::empirical(B),
                                       derive_root(seed.root, seed.stream, 1));
    const std::uint64_t froot = derive_root(seed.root, seed.stream, 2);
    std::vector<double> fresh(B);
    for (std::size_t b = 0; b < B; ++b)
        fresh[b] = eval(stat, shift(generate(dist, data.n(), {froot, b}), off));
    const Estimate a = mean_se(boot), f = mean_se(fresh);
    return {std::fabs(a.value - f.value), std::sqrt(a.se * a.se + f.se * f.se)};
}

double conditional_mean_gap(const StatisticSpec& stat, const Dataset& data,
                            const DistributionSpec& dist, std::size_t B, RngSeed seed) {
    return conditional_mean_gap_detail(stat, data, dist, B, seed).value;
}

Estimate uniform_perturbation_sensitivity_detail(const StatisticSpec& stat, const DataGenerator& gen,
                                                 std::size_t n, double radius, std::size_t grid_size,
                                                 std::size_t trials, RngSeed seed, std::size_t inner) {
    if (grid_size < 1) throw Error("grid_size must be >= 1");
    if (trials < 1 || inner < 1) throw Error("trials and inner must be >= 1");
    const Dataset probe = gen(n, {derive_root(seed.root, seed.stream, 9), 0});
    const std::size_t d = probe.d();
    std::vector<std::vector<double>> grid;
    if (d == 1 && grid_size == 1) grid = {{radius}};
    else grid = make_offset_grid(d, radius, grid_size, {derive_root(seed.root, seed.stream, 3), 0});
    const double rn = std::sqrt(double(n));
    for (auto& o : grid)
        for (double& x : o) x = snap(x / rn);

    auto deltas = [&](const Dataset& x, std::vector<double>& out) {
        const double g0 = eval(stat, x);
        for (std::size_t j = 0; j < grid.size(); ++j) out[j] = eval(stat, shift(x, grid[j])) - g0;
    };

    std::vector<double> expect(grid.size(), 0.0), tmp(grid.size());
    const std::uint64_t iroot = derive_root(seed.root, seed.stream, 4);
    for (std::size_t t = 0; t < inner; ++t) {
        deltas(gen(n, {iroot, t}), tmp);
        for (std::size_t j = 0; j < grid.size(); ++j) expect[j] += tmp[j];
    }
    for (double& e : expect) e /= double(inner);

    std::vector<double> sups(trials);
    const std::uint64_t oroot = derive_root(seed.root, seed.stream, 5);
    for (std::size_t t = 0; t < trials; ++t) {
        deltas(gen(n, {oroot, t}), tmp);
        double s = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) s = std::max(s, std::fabs(tmp[j] - expect[j]));
        sups[t] = s;
    }
    return mean_se(sups);
}

double uniform_perturbation_sensitivity(const StatisticSpec& stat, const DataGenerator& gen,
                                        std::size_t n, double radius, std::size_t grid_size,
                                        std::size_t trials, RngSeed seed, std::size_t inner) {
    return uniform_perturbation_sensitivity_detail(stat, gen, n, radius, grid_size, trials, seed, inner)
        .value;
}

}  // namespace bootlab
