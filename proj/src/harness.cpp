#include "bootlab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bootlab/diagnostics.hpp"
#include "bootlab/metric.hpp"
#include "bootlab/parallel.hpp"

namespace bootlab {

namespace {

// Seed-derivation tags; each purpose gets its own family of streams.
enum Tag : std::uint64_t {
    kData = 1, kCi, kFresh, kOracle, kCond, kGap, kStab, kIso, kLimit, kBoot2, kGrid, kFresh2,
};

std::uint64_t root_for(const ScenarioConfig& c, std::size_t ni, Tag tag, std::uint64_t extra = 0) {
    return derive_root(c.seed, ni, tag, extra);
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / double(v.size());
}

template <class Fn>
std::vector<double> parallel_values(std::size_t count, std::size_t threads, Fn&& fn) {
    std::vector<double> out(count);
    parallel_for(count, threads, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

bool gaussian_family(const DistributionSpec& d) {
    using K = DistributionSpec::Kind;
    return d.lattice_bits == 0 &&
           (d.kind == K::StdNormal || d.kind == K::ScaledNormal || d.kind == K::TwoSampleGaussian);
}

// One fresh draw of g(Y + offset). Column-sum statistics on Gaussian laws draw the
// sums directly (exact in law, O(d) instead of O(nd)).
double fresh_value(const StatisticSpec& stat, const DistributionSpec& dist, std::size_t n,
                   const std::vector<double>* offset, RngSeed seed) {
    if (uses_column_sums(stat) && gaussian_family(dist)) {
        const auto mu = dist.mean();
        const auto var = dist.variance();
        Rng rng(seed);
        std::vector<double> s(mu.size());
        const double nn = double(n), rn = std::sqrt(double(n));
        for (std::size_t k = 0; k < s.size(); ++k) {
            const double o = offset ? (*offset)[k] : 0.0;
            s[k] = nn * (mu[k] + o) + rn * std::sqrt(var[k]) * rng.normal();
        }
        return eval_from_column_sums(stat, n, s);
    }
    Dataset y = generate(dist, n, seed);
    if (offset) y = shift(y, *offset);
    return eval(stat, y);
}

std::vector<double> fresh_law(const StatisticSpec& stat, const DistributionSpec& dist, std::size_t n,
                              std::size_t count, std::uint64_t root, std::size_t threads,
                              const std::vector<double>* offset = nullptr) {
    return parallel_values(count, threads,
                           [&](std::size_t b) { return fresh_value(stat, dist, n, offset, {root, b}); });
}

double centered_ks(const std::vector<double>& a, const std::vector<double>& b) {
    return ks_distance(EmpiricalLaw(a).centered(), EmpiricalLaw(b).centered());
}

double centered_df(const std::vector<double>& a, const std::vector<double>& b) {
    return estimate_df(EmpiricalLaw(a).centered(), EmpiricalLaw(b).centered());
}

void put_mean(nlohmann::json& f, const std::string& key, const std::vector<Row>& rows,
              std::optional<double> Row::*field) {
    std::vector<double> v;
    for (const auto& r : rows)
        if (r.*field) v.push_back(*(r.*field));
    if (!v.empty()) f[key] = mean_of(v);
}

// Population value of a column-sum statistic: g evaluated on sums n * mu.
double population_anchor(const StatisticSpec& stat, const DistributionSpec& dist, std::size_t n) {
    if (!uses_column_sums(stat)) throw ConfigError("anchor = \"population\" needs a column-mean statistic");
    auto s = dist.mean();
    for (double& x : s) x *= double(n);
    return eval_from_column_sums(stat, n, s);
}

CiMethod method_for(const ScenarioConfig& c, std::size_t ni, std::size_t n, std::size_t d) {
    const MethodConfig& mc = c.method;
    CiMethod m;
    m.kind = mc.kind;
    const auto mu = c.distribution.mean();
    if (mu.size() != d) throw ConfigError("distribution dimension does not match the data");
    m.known_mean = mc.known_mean ? *mc.known_mean : mu;
    if (mc.anchor_population) m.anchor = population_anchor(c.statistic, c.distribution, n);
    m.holder_C = mc.holder_C;
    m.holder_alpha = mc.holder_alpha;
    m.gauss_draws = mc.gauss_draws;
    const double rn = std::sqrt(double(n));
    if (mc.kind == CiMethod::Kind::ShiftedSup) {
        m.gamma = mc.gamma ? *mc.gamma : std::log(double(n)) / rn;
        m.grid = make_offset_grid(d, m.gamma, mc.grid_points, {root_for(c, ni, kGrid), 0});
    } else if (mc.kind == CiMethod::Kind::Robust) {
        const double r = mc.robust_radius / rn;
        auto offs = make_offset_grid(d, r, mc.robust_points, {root_for(c, ni, kGrid), 1});
        for (auto& o : offs)
            for (std::size_t k = 0; k < d; ++k) o[k] += mu[k];
        m.grid = std::move(offs);
    }
    return m;
}

StatisticSpec statistic_for_n(const ScenarioConfig& c, std::size_t ni, std::size_t n) {
    StatisticSpec s = c.statistic;
    if (s.kind == StatKind::IsolatedCount && c.isolated_oracle) {
        const std::size_t datasets = std::max<std::size_t>(20, (100000 + n - 1) / n);
        s.centering_c = isolation_probability_mc(c.distribution, n, datasets, {root_for(c, ni, kIso), 0});
    }
    return s;
}

ScenarioReport start(const ScenarioConfig& c) {
    if (c.n_grid.empty()) throw ConfigError("n_grid must be non-empty");
    ScenarioReport r;
    r.config = c;
    return r;
}

}  // namespace

double isolation_probability_mc(const DistributionSpec& dist, std::size_t n, std::size_t datasets,
                                RngSeed seed) {
    double total = 0.0;
    for (std::size_t t = 0; t < datasets; ++t) {
        const Dataset x = generate(dist, n, {derive_root(seed.root, seed.stream), t});
        total += eval_isolated_count(x, 0.0) / std::sqrt(double(x.n()));
    }
    return total / double(datasets);
}

double ScenarioReport::get(std::size_t n, const std::string& field, std::optional<double> delta) const {
    for (const auto& s : per_n)
        if (s.n == n && s.delta == delta) {
            if (!s.fields.contains(field)) throw Error("report has no field '" + field + "'");
            return s.fields.at(field).get<double>();
        }
    throw Error("report has no entry for n=" + std::to_string(n));
}

ScenarioReport run_scenario(const ScenarioConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioReport report = start(c);
    std::vector<double> ns, l3s;
    for (std::size_t ni = 0; ni < c.n_grid.size(); ++ni) {
        const std::size_t n = c.n_grid[ni];
        const StatisticSpec stat = statistic_for_n(c, ni, n);
        const std::size_t d = generate(c.distribution, n, {root_for(c, ni, kData), 0}).d();
        const CiMethod method = method_for(c, ni, n, d);

        std::optional<double> pop;
        if (method.anchor) {
            pop = *method.anchor;
        } else if (c.estimand == "population") {
            const std::size_t R = std::max(4 * c.B, c.oracle_min);
            pop = mean_of(fresh_law(stat, c.distribution, n, R, root_for(c, ni, kOracle), c.threads));
        }
        std::vector<double> fresh;
        if (c.law_reps > 0)
            fresh = fresh_law(stat, c.distribution, n, c.B, root_for(c, ni, kFresh), c.threads);

        // The centered bootstrap targets the law of g(Y) itself; other methods only its shape.
        const bool raw_laws = c.method.kind == CiMethod::Kind::Centered;
        std::vector<Row> rows(c.outer_reps);
        parallel_for(c.outer_reps, c.threads, [&](std::size_t rep) {
            const Dataset x = generate(c.distribution, n, {root_for(c, ni, kData), rep});
            CiRequest req{stat, x, c.B, c.method.alpha, method, {root_for(c, ni, kCi), rep}};
            const CiResult ci = build_ci(req);
            Row& row = rows[rep];
            row.n = n;
            row.rep = rep;
            row.method = ci.method;
            row.center = ci.center;
            row.lo = ci.lo;
            row.hi = ci.hi;
            row.boot_mean = ci.bootstrap_mean;
            double below = 0.0;
            for (double v : ci.replicates) below += v < ci.center;
            row.below_count = below;
            if (pop) {
                row.estimand = *pop;
            } else if (c.estimand == "conditional") {
                const auto xbar = column_mean(x);
                const auto mu = c.distribution.mean();
                std::vector<double> off(d);
                for (std::size_t k = 0; k < d; ++k) off[k] = xbar[k] - mu[k];
                const std::size_t R = std::max<std::size_t>(4 * c.B, 1);
                std::vector<double> v(R);
                const std::uint64_t croot = root_for(c, ni, kCond, rep);
                for (std::size_t b = 0; b < R; ++b) v[b] = fresh_value(stat, c.distribution, n, &off, {croot, b});
                row.estimand = mean_of(v);
            }
            if (row.estimand) row.covered = (ci.lo <= *row.estimand && *row.estimand <= ci.hi) ? 1.0 : 0.0;
            if (rep < c.law_reps) {
                if (raw_laws) {
                    row.ks = ks_distance(EmpiricalLaw(ci.replicates), EmpiricalLaw(fresh));
                    row.df_lower = estimate_df(EmpiricalLaw(ci.replicates), EmpiricalLaw(fresh));
                } else {
                    row.ks = centered_ks(ci.replicates, fresh);
                    row.df_lower = centered_df(ci.replicates, fresh);
                }
            }
            if (c.mean_gap) {
                const Estimate g = conditional_mean_gap_detail(stat, x, c.distribution, c.B,
                                                               {root_for(c, ni, kGap), rep});
                row.mean_gap = g.value;
                row.gap_se = g.se;
            }
        });

        NSummary s;
        s.n = n;
        auto& f = s.fields;
        put_mean(f, "coverage", rows, &Row::covered);
        put_mean(f, "estimand", rows, &Row::estimand);
        put_mean(f, "df_lower", rows, &Row::df_lower);
        put_mean(f, "ks", rows, &Row::ks);
        put_mean(f, "mean_gap", rows, &Row::mean_gap);
        std::vector<double> widths;
        double below = 0.0, gap_pos = 0.0, gap_count = 0.0;
        for (const auto& r : rows) {
            widths.push_back(*r.hi - *r.lo);
            below += *r.below_count;
            if (r.mean_gap) {
                gap_count += 1.0;
                gap_pos += *r.mean_gap > 3.0 * *r.gap_se;
            }
        }
        f["mean_width"] = mean_of(widths);
        f["below_total"] = below;
        f["replicates_total"] = double(c.B * c.outer_reps);
        if (gap_count > 0) f["gap_positive_fraction"] = gap_pos / gap_count;
        if (c.stability.enabled) {
            const auto gen = generator_for(c.distribution);
            const double l3 = first_order_stability(stat, gen, n, c.stability.trials, {root_for(c, ni, kStab), 0});
            const Estimate r = uniform_perturbation_sensitivity_detail(stat, gen, n, c.stability.radius,
                                                                       c.stability.grid, c.stability.trials,
                                                                       {root_for(c, ni, kStab), 1},
                                                                       c.stability.inner);
            f["first_order_L3"] = l3;
            f["r_nB"] = r.value;
            f["r_nB_se"] = r.se;
            ns.push_back(double(n));
            l3s.push_back(l3);
        }
        report.per_n.push_back(std::move(s));
        for (auto& r : rows) report.rows.push_back(std::move(r));
    }
    if (ns.size() >= 2) {
        bool positive = true;
        for (double v : l3s) positive = positive && v > 0.0;
        if (positive) report.extra["rate_exponent_fit"] = fit_rate_exponent(ns, l3s);
    }
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

ScenarioReport run_kernel_test_scenario(const ScenarioConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    if (c.statistic.kind != StatKind::KernelSoftmaxMMD)
        throw ConfigError("kernel_test scenarios need a KernelSoftmaxMMD statistic");
    if (c.distribution.kind != DistributionSpec::Kind::TwoSampleGaussian)
        throw ConfigError("kernel_test scenarios need a TwoSampleGaussian distribution");
    ScenarioReport report = start(c);
    for (std::size_t ni = 0; ni < c.n_grid.size(); ++ni) {
        const std::size_t n = c.n_grid[ni];
        for (std::size_t di = 0; di < c.kernel_deltas.size(); ++di) {
            DistributionSpec dist = c.distribution;
            dist.delta = c.kernel_deltas[di];
            std::vector<Row> rows(c.outer_reps);
            parallel_for(c.outer_reps, c.threads, [&](std::size_t rep) {
                const Dataset x = generate(dist, n, {root_for(c, ni, kData, di), rep});
                const KernelGram gram(x, c.statistic);
                const std::vector<double> ones(n, 1.0);
                const double T = gram.eval(ones, ones);
                const std::uint64_t broot = derive_root(root_for(c, ni, kCi, di), rep);
                std::vector<double> ref(c.B), v(n), cnt(n);
                for (std::size_t b = 0; b < c.B; ++b) {
                    std::fill(v.begin(), v.end(), 0.0);
                    std::fill(cnt.begin(), cnt.end(), 0.0);
                    Rng rng({broot, b});
                    std::vector<std::uint32_t> idx(n);
                    for (auto& i : idx) i = rng.below(std::uint32_t(n));
                    for (std::size_t i = 0; i < n; ++i) {
                        const bool swapped = rng.next_u32() >> 31;
                        v[idx[i]] += swapped ? -1.0 : 1.0;
                        cnt[idx[i]] += 1.0;
                    }
                    ref[b] = gram.eval(v, cnt);
                }
                Row& row = rows[rep];
                row.n = n;
                row.rep = rep;
                row.method = "kernel_test";
                row.delta = dist.delta;
                row.center = T;
                row.boot_mean = mean_of(ref);
                row.pvalue = pvalue_from_values(T, ref);
                row.covered = *row.pvalue <= c.method.alpha ? 1.0 : 0.0;
            });
            NSummary s;
            s.n = n;
            s.delta = dist.delta;
            std::vector<double> ps;
            for (const auto& r : rows) ps.push_back(*r.pvalue);
            s.fields["ks_uniform"] = ks_uniform(EmpiricalLaw(ps));
            put_mean(s.fields, "rejection_rate", rows, &Row::covered);
            put_mean(s.fields, "mean_pvalue", rows, &Row::pvalue);
            report.per_n.push_back(std::move(s));
            for (auto& r : rows) report.rows.push_back(std::move(r));
        }
    }
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

namespace {

struct StackedSetup {
    std::size_t n, m, n_eval;
    StatisticSpec stat;
    double mu, var;
};

StackedSetup stacked_setup(const ScenarioConfig& c, std::size_t n) {
    if (c.statistic.kind != StatKind::StackedRisk)
        throw ConfigError("stacked scenarios need a StackedRisk statistic");
    if (c.distribution.d != 1) throw ConfigError("stacked scenarios need scalar observations");
    StackedSetup s;
    s.n = n;
    s.m = std::size_t(std::floor(c.stacked.split * double(n)));
    if (s.m >= n) throw ConfigError("stacked split leaves no evaluation rows");
    s.n_eval = n - s.m;
    s.stat = c.statistic;
    s.stat.split_m = 0;
    const double ne = double(s.n_eval);
    if (c.stacked.beta_rule == "sqrt") s.stat.beta = std::sqrt(ne);
    else if (c.stacked.beta_rule == "quarter") s.stat.beta = std::pow(ne, 0.25);
    else s.stat.beta = c.stacked.beta;
    s.mu = c.distribution.mean()[0];
    s.var = c.distribution.variance()[0];
    return s;
}

Dataset tail_of(const Dataset& x, std::size_t m) {
    std::vector<double> v(x.values().begin() + std::ptrdiff_t(m), x.values().end());
    return Dataset::column(std::move(v));
}

struct Moments {
    double m1 = 0.0, m2 = 0.0;
};

Moments moments(const Dataset& x) {
    Moments r;
    for (std::size_t i = 0; i < x.n(); ++i) {
        r.m1 += x(i, 0);
        r.m2 += x(i, 0) * x(i, 0);
    }
    r.m1 /= double(x.n());
    r.m2 /= double(x.n());
    return r;
}

// Expected square loss at theta under a law with the given first two moments.
double expected_loss(const Moments& mo, double theta) { return mo.m2 - 2.0 * theta * mo.m1 + theta * theta; }

Moments population_moments(const StackedSetup& s) { return {s.mu, s.var + s.mu * s.mu}; }

double centered_risk(const StackedSetup& s, const Dataset& weights_data, const Dataset& eval_data,
                     const Moments& ref) {
    const StackedResult r = eval_stacked(weights_data, eval_data, s.stat);
    return r.risk - std::sqrt(double(s.n_eval)) * expected_loss(ref, r.theta);
}

}  // namespace

ScenarioReport run_stacked_scenario(const ScenarioConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioReport report = start(c);
    for (std::size_t ni = 0; ni < c.n_grid.size(); ++ni) {
        const StackedSetup s = stacked_setup(c, c.n_grid[ni]);
        const Moments pm = population_moments(s);
        const std::uint64_t froot = root_for(c, ni, kFresh);
        const std::vector<double> fresh = parallel_values(c.B, c.threads, [&](std::size_t b) {
            const Dataset y = generate(c.distribution, s.n_eval, {froot, b});
            return centered_risk(s, y, y, pm);
        });
        std::vector<Row> rows(c.outer_reps);
        parallel_for(c.outer_reps, c.threads, [&](std::size_t rep) {
            const Dataset x = generate(c.distribution, s.n, {root_for(c, ni, kData), rep});
            const Dataset tail = tail_of(x, s.m);
            const Moments em = moments(tail);
            const std::uint64_t broot = derive_root(root_for(c, ni, kCi), rep);
            std::vector<double> boot(c.B);
            for (std::size_t b = 0; b < c.B; ++b) {
                const Dataset z = resample_empirical(tail, {broot, b});
                boot[b] = centered_risk(s, z, z, em);
            }
            Row& row = rows[rep];
            row.n = s.n;
            row.rep = rep;
            row.method = "stacked_bootstrap";
            row.center = centered_risk(s, tail, tail, pm);
            row.boot_mean = mean_of(boot);
            row.ks = centered_ks(boot, fresh);
            row.df_lower = centered_df(boot, fresh);
            if (c.stacked.closed_form_limit) {
                Rng rng({root_for(c, ni, kLimit), rep});
                const double w = std::sqrt(double(s.n)) * em.m1;
                std::vector<double> lim(c.B), free(c.B);
                for (std::size_t b = 0; b < c.B; ++b) {
                    const double z1 = 2.0 * rng.normal(), z2 = rng.normal();
                    lim[b] = z1 + z2 * std::tanh(4.0 * z2 + 4.0 * w);
                }
                for (std::size_t b = 0; b < c.B; ++b) {
                    const double z1 = 2.0 * rng.normal(), z2 = rng.normal();
                    free[b] = z1 + z2 * std::tanh(4.0 * z2);
                }
                row.ks_limit = centered_ks(boot, lim);
                row.ks_limit_free = centered_ks(boot, free);
            }
        });
        NSummary sum;
        sum.n = s.n;
        sum.fields["beta"] = *s.stat.beta;
        sum.fields["n_eval"] = double(s.n_eval);
        put_mean(sum.fields, "ks", rows, &Row::ks);
        put_mean(sum.fields, "df_lower", rows, &Row::df_lower);
        put_mean(sum.fields, "ks_limit", rows, &Row::ks_limit);
        put_mean(sum.fields, "ks_limit_free", rows, &Row::ks_limit_free);
        report.per_n.push_back(std::move(sum));
        for (auto& r : rows) report.rows.push_back(std::move(r));
    }
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

ScenarioReport run_double_bootstrap_stacked(const ScenarioConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioReport report = start(c);
    for (std::size_t ni = 0; ni < c.n_grid.size(); ++ni) {
        const StackedSetup s = stacked_setup(c, c.n_grid[ni]);
        const Moments pm = population_moments(s);
        const double beta = *s.stat.beta;
        std::vector<Row> rows(c.outer_reps);
        parallel_for(c.outer_reps, c.threads, [&](std::size_t rep) {
            const Dataset x = generate(c.distribution, s.n, {root_for(c, ni, kData), rep});
            const Dataset tail = tail_of(x, s.m);
            const Moments em = moments(tail);
            const std::uint64_t r1 = derive_root(root_for(c, ni, kCi), rep);
            const std::uint64_t r2 = derive_root(root_for(c, ni, kBoot2), rep);
            std::vector<double> dbl(c.B), single, fresh(c.B);
            for (std::size_t b = 0; b < c.B; ++b) {
                const Dataset z1 = resample_empirical(tail, {r1, b});
                const Dataset z2 = resample_empirical(tail, {r2, b});
                dbl[b] = centered_risk(s, z2, z1, em);
            }
            if (c.stacked.single_compare) {
                const std::uint64_t r3 = derive_root(root_for(c, ni, kCi, 1), rep);
                single.resize(c.B);
                for (std::size_t b = 0; b < c.B; ++b) {
                    const Dataset z = resample_empirical(tail, {r3, b});
                    single[b] = centered_risk(s, z, z, em);
                }
            }
            // Fresh analogue: weights from a fresh sample whose risks carry the observed
            // deviation of the empirical risks of X from their expectations.
            const auto& th = s.stat.base_predictions;
            std::vector<double> shift_k(th.size());
            for (std::size_t k = 0; k < th.size(); ++k)
                shift_k[k] = expected_loss(em, th[k]) - expected_loss(pm, th[k]);
            const std::uint64_t f1 = derive_root(root_for(c, ni, kFresh), rep);
            const std::uint64_t f2 = derive_root(root_for(c, ni, kFresh2), rep);
            std::vector<double> r(th.size()), w(th.size());
            for (std::size_t b = 0; b < c.B; ++b) {
                const Dataset y1 = generate(c.distribution, s.n_eval, {f1, b});
                const Dataset y2 = generate(c.distribution, s.n_eval, {f2, b});
                const Moments m2 = moments(y2);
                for (std::size_t k = 0; k < th.size(); ++k) r[k] = expected_loss(m2, th[k]) + shift_k[k];
                const double rmin = *std::min_element(r.begin(), r.end());
                double z = 0.0, theta = 0.0;
                for (std::size_t k = 0; k < th.size(); ++k) {
                    w[k] = std::exp(-beta * (r[k] - rmin));
                    z += w[k];
                }
                for (std::size_t k = 0; k < th.size(); ++k) theta += th[k] * w[k] / z;
                double risk = 0.0;
                for (std::size_t i = 0; i < y1.n(); ++i) risk += s.stat.loss(y1(i, 0), theta);
                risk /= std::sqrt(double(s.n_eval));
                fresh[b] = risk - std::sqrt(double(s.n_eval)) * expected_loss(pm, theta);
            }
            Row& row = rows[rep];
            row.n = s.n;
            row.rep = rep;
            row.method = "double_bootstrap";
            row.center = centered_risk(s, tail, tail, pm);
            row.boot_mean = mean_of(dbl);
            row.ks = centered_ks(dbl, fresh);
            row.df_lower = centered_df(dbl, fresh);
            if (!single.empty()) row.ks_single = centered_ks(dbl, single);
        });
        NSummary sum;
        sum.n = s.n;
        sum.fields["beta"] = beta;
        sum.fields["n_eval"] = double(s.n_eval);
        put_mean(sum.fields, "ks", rows, &Row::ks);
        put_mean(sum.fields, "df_lower", rows, &Row::df_lower);
        put_mean(sum.fields, "ks_single", rows, &Row::ks_single);
        report.per_n.push_back(std::move(sum));
        for (auto& r : rows) report.rows.push_back(std::move(r));
    }
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

ScenarioReport run(const ScenarioConfig& c) {
    switch (c.kind) {
        case ScenarioConfig::Kind::Coverage: return run_scenario(c);
        case ScenarioConfig::Kind::KernelTest: return run_kernel_test_scenario(c);
        case ScenarioConfig::Kind::Stacked: return run_stacked_scenario(c);
        case ScenarioConfig::Kind::DoubleStacked: return run_double_bootstrap_stacked(c);
    }
    throw Error("unknown scenario kind");
}

// ---- output ----

namespace {

std::string num(std::optional<double> x) {
    if (!x) return "";
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, *x);
    return std::string(buf, r.ptr);
}

const char* kind_str(ScenarioConfig::Kind k) {
    switch (k) {
        case ScenarioConfig::Kind::Coverage: return "coverage";
        case ScenarioConfig::Kind::KernelTest: return "kernel_test";
        case ScenarioConfig::Kind::Stacked: return "stacked";
        case ScenarioConfig::Kind::DoubleStacked: return "double_stacked";
    }
    return "?";
}

}  // namespace

std::string report_csv(const ScenarioReport& rep) {
    std::ostringstream out;
    out << "schema_version,scenario,kind,n,rep,method,delta,center,lo,hi,estimand,covered,boot_mean,"
           "below_count,df_lower,ks,ks_limit,ks_limit_free,ks_single,mean_gap,gap_se,pvalue\n";
    for (const auto& r : rep.rows) {
        out << kSchemaVersion << ',' << rep.config.name << ',' << kind_str(rep.config.kind) << ',' << r.n
            << ',' << r.rep << ',' << r.method << ',' << num(r.delta) << ',' << num(r.center) << ','
            << num(r.lo) << ',' << num(r.hi) << ',' << num(r.estimand) << ',' << num(r.covered) << ','
            << num(r.boot_mean) << ',' << num(r.below_count) << ',' << num(r.df_lower) << ','
            << num(r.ks) << ',' << num(r.ks_limit) << ',' << num(r.ks_limit_free) << ','
            << num(r.ks_single) << ',' << num(r.mean_gap) << ',' << num(r.gap_se) << ','
            << num(r.pvalue) << '\n';
    }
    return out.str();
}

nlohmann::json report_summary(const ScenarioReport& rep) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["scenario"] = rep.config.name;
    j["seed"] = rep.config.seed;
    j["config"] = to_json(rep.config);
    auto& arr = j["per_n"] = nlohmann::json::array();
    for (const auto& s : rep.per_n) {
        nlohmann::json e = s.fields;
        e["n"] = s.n;
        if (s.delta) e["delta"] = *s.delta;
        arr.push_back(e);
    }
    j["aggregates"] = rep.extra;
    j["wall_time_s"] = rep.wall_time;
    return j;
}

void write_report(const ScenarioReport& rep) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(rep.config.out_dir, ec);
    if (ec) throw Error("cannot create output directory " + rep.config.out_dir + ": " + ec.message());
    const fs::path base = fs::path(rep.config.out_dir) / rep.config.name;
    {
        std::ofstream out(base.string() + ".csv", std::ios::binary);
        if (!out) throw Error("cannot write " + base.string() + ".csv");
        out << report_csv(rep);
    }
    std::ofstream out(base.string() + ".summary.json", std::ios::binary);
    if (!out) throw Error("cannot write " + base.string() + ".summary.json");
    out << report_summary(rep).dump(2) << '\n';
}

}  // namespace bootlab
