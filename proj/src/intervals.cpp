#include "bootlab/intervals.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace bootlab {

namespace {

constexpr std::size_t kBlock = 64;

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Column sums of replicates [b0, b0+len) via a count matrix times the data.
RowMat block_column_sums(const Dataset& data, std::size_t b0, std::size_t len, std::uint64_t root) {
    const std::size_t n = data.n();
    RowMat C = RowMat::Zero(Eigen::Index(len), Eigen::Index(n));
    for (std::size_t r = 0; r < len; ++r) {
        Rng rng({root, b0 + r});
        for (std::size_t i = 0; i < n; ++i) C(Eigen::Index(r), rng.below(std::uint32_t(n))) += 1.0;
    }
    Eigen::Map<const RowMat> X(data.values().data(), Eigen::Index(n), Eigen::Index(data.d()));
    return C * X;
}

template <class Fn>
void for_each_sums(const Dataset& data, std::size_t B, std::uint64_t root, Fn&& fn) {
    std::vector<double> sums(data.d());
    for (std::size_t b0 = 0; b0 < B; b0 += kBlock) {
        const std::size_t len = std::min(kBlock, B - b0);
        const RowMat S = block_column_sums(data, b0, len, root);
        for (std::size_t r = 0; r < len; ++r) {
            for (std::size_t k = 0; k < data.d(); ++k) sums[k] = S(Eigen::Index(r), Eigen::Index(k));
            fn(b0 + r, sums);
        }
    }
}

void check_request(const CiRequest& req) {
    if (req.B < 100) throw Error("confidence intervals need B >= 100");
    if (!(req.alpha > 0.0 && req.alpha < 1.0)) throw Error("alpha must lie in (0,1)");
}

CiResult base_result(const CiRequest& req, CiMethod::Kind kind) {
    CiResult r;
    r.method = method_name(kind);
    r.alpha = req.alpha;
    r.B = req.B;
    r.seed = req.seed;
    r.center = eval(req.statistic, req.data);
    return r;
}

std::uint64_t replicate_root(const RngSeed& s) { return derive_root(s.root, s.stream); }

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

CiResult reflection_interval(const CiRequest& req, const ResamplePlan& plan, CiMethod::Kind kind) {
    CiResult r = base_result(req, kind);
    const BootstrapLaw bl = bootstrap_law(req.statistic, req.data, plan, req.seed);
    r.bootstrap_mean = bl.mean;
    r.lo = r.center - bl.law.quantile(1.0 - req.alpha / 2);
    r.hi = r.center - bl.law.quantile(req.alpha / 2);
    r.replicates = bl.raw;
    return r;
}

CiResult sup_interval(const CiRequest& req, const std::vector<std::vector<double>>& offsets,
                      CiMethod::Kind kind) {
    check_request(req);
    if (offsets.empty()) throw Error("offset grid must be non-empty");
    CiResult r = base_result(req, kind);
    const auto vals = bootstrap_values_shifted(req.statistic, req.data, offsets, req.B,
                                               replicate_root(req.seed));
    double t = 0.0;
    for (std::size_t j = 0; j < vals.size(); ++j) {
        const double m = mean_of(vals[j]);
        if (j == 0) r.bootstrap_mean = m;
        t = std::max(t, abs_quantile(vals[j], m, req.alpha));
    }
    r.t_star = t;
    r.lo = r.center - t;
    r.hi = r.center + t;
    r.replicates = vals[0];
    return r;
}

}  // namespace

std::vector<double> bootstrap_values(const StatisticSpec& stat, const Dataset& data,
                                     const ResamplePlan& plan, std::uint64_t root) {
    if (plan.B < 1) throw Error("B must be >= 1");
    std::vector<double> out(plan.B);
    if (uses_column_sums(stat) && plan.mode != ResamplePlan::Mode::PairPermuted) {
        const auto off = plan_offset(data, plan);
        const double n = double(data.n());
        for_each_sums(data, plan.B, root, [&](std::size_t b, std::vector<double>& s) {
            for (std::size_t k = 0; k < s.size(); ++k) s[k] += n * off[k];
            out[b] = eval_from_column_sums(stat, data.n(), s);
        });
        return out;
    }
    for (std::size_t b = 0; b < plan.B; ++b) out[b] = eval(stat, resample(data, plan, {root, b}));
    return out;
}

std::vector<std::vector<double>> bootstrap_values_shifted(
    const StatisticSpec& stat, const Dataset& data, const std::vector<std::vector<double>>& offsets,
    std::size_t B, std::uint64_t root) {
    for (const auto& o : offsets)
        if (o.size() != data.d()) throw Error("offset length does not match d");
    std::vector<std::vector<double>> out(offsets.size(), std::vector<double>(B));
    if (uses_column_sums(stat)) {
        const double n = double(data.n());
        std::vector<double> t(data.d());
        for_each_sums(data, B, root, [&](std::size_t b, const std::vector<double>& s) {
            for (std::size_t j = 0; j < offsets.size(); ++j) {
                for (std::size_t k = 0; k < s.size(); ++k) t[k] = s[k] + n * offsets[j][k];
                out[j][b] = eval_from_column_sums(stat, data.n(), t);
            }
        });
        return out;
    }
    for (std::size_t b = 0; b < B; ++b) {
        const Dataset z = resample_empirical(data, {root, b});
        for (std::size_t j = 0; j < offsets.size(); ++j) out[j][b] = eval(stat, shift(z, offsets[j]));
    }
    return out;
}

BootstrapLaw bootstrap_law(const StatisticSpec& stat, const Dataset& data, const ResamplePlan& plan,
                           RngSeed seed) {
    std::vector<double> raw = bootstrap_values(stat, data, plan, replicate_root(seed));
    const double m = mean_of(raw);
    std::vector<double> c(raw.size());
    for (std::size_t b = 0; b < raw.size(); ++b) c[b] = raw[b] - m;
    return {EmpiricalLaw(std::move(c)), m, std::move(raw)};
}

double abs_quantile(const std::vector<double>& values, double center, double level) {
    std::vector<double> a(values.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::fabs(values[i] - center);
    return EmpiricalLaw(std::move(a)).quantile(1.0 - level);
}

CiResult ci_plain(const CiRequest& req) {
    check_request(req);
    return reflection_interval(req, ResamplePlan::empirical(req.B), CiMethod::Kind::PlainQuantile);
}

CiResult ci_centered(const CiRequest& req) {
    check_request(req);
    const auto& mu = req.method.known_mean;
    if (mu.size() != req.data.d()) throw Error("known_mean length does not match d");
    const ResamplePlan plan = ResamplePlan::centered(mu, req.B);
    if (!req.method.anchor) return reflection_interval(req, plan, CiMethod::Kind::Centered);
    CiResult r = base_result(req, CiMethod::Kind::Centered);
    const auto raw = bootstrap_values(req.statistic, req.data, plan, replicate_root(req.seed));
    r.bootstrap_mean = mean_of(raw);
    r.t_star = abs_quantile(raw, *req.method.anchor, req.alpha);
    r.lo = r.center - r.t_star;
    r.hi = r.center + r.t_star;
    r.replicates = raw;
    return r;
}

CiResult ci_corrected(const CiRequest& req) {
    check_request(req);
    const auto& m = req.method;
    if (m.holder_C < 0.0 || !(m.holder_alpha > 0.0)) throw Error("invalid Holder constants");
    CiResult r = base_result(req, CiMethod::Kind::Corrected);
    const auto raw = bootstrap_values(req.statistic, req.data, ResamplePlan::empirical(req.B),
                                      replicate_root(req.seed));
    r.bootstrap_mean = mean_of(raw);
    r.t_b = abs_quantile(raw, r.bootstrap_mean, req.alpha / 2);
    if (m.holder_C > 0.0) {
        const RngSeed gseed{derive_root(req.seed.root, req.seed.stream, 0x6a55), 0};
        const double q = gaussian_max_quantile(req.data, req.alpha / 2, m.gauss_draws, gseed);
        r.t_g = m.holder_C * std::pow(q, m.holder_alpha);
    }
    r.lo = r.center - (r.t_b + r.t_g);
    r.hi = r.center + (r.t_b + r.t_g);
    r.replicates = raw;
    return r;
}

CiResult ci_shifted_sup(const CiRequest& req) {
    return sup_interval(req, req.method.grid, CiMethod::Kind::ShiftedSup);
}

CiResult ci_robust(const CiRequest& req) {
    const auto xbar = column_mean(req.data);
    std::vector<std::vector<double>> offsets;
    for (const auto& mu : req.method.grid) {
        if (mu.size() != req.data.d()) throw Error("candidate mean length does not match d");
        std::vector<double> o(mu.size());
        for (std::size_t k = 0; k < o.size(); ++k) o[k] = mu[k] - xbar[k];
        offsets.push_back(std::move(o));
    }
    return sup_interval(req, offsets, CiMethod::Kind::Robust);
}

CiResult build_ci(const CiRequest& req) {
    switch (req.method.kind) {
        case CiMethod::Kind::PlainQuantile: return ci_plain(req);
        case CiMethod::Kind::Centered: return ci_centered(req);
        case CiMethod::Kind::Corrected: return ci_corrected(req);
        case CiMethod::Kind::ShiftedSup: return ci_shifted_sup(req);
        case CiMethod::Kind::Robust: return ci_robust(req);
    }
    throw Error("unknown CI method");
}

double gaussian_max_quantile(const Dataset& data, double beta, std::size_t draws, RngSeed seed) {
    if (draws < 1000) throw Error("gaussian_max_quantile needs draws >= 1000");
    if (!(beta > 0.0 && beta < 1.0)) throw Error("beta must lie in (0,1)");
    const std::size_t n = data.n(), d = data.d();
    const auto mu = column_mean(data);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(Eigen::Index(d), Eigen::Index(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                S(Eigen::Index(a), Eigen::Index(b)) += (data(i, a) - mu[a]) * (data(i, b) - mu[b]);
    S /= double(n > 1 ? n - 1 : 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    double jitter = 1e-10 * (S.trace() / double(d) + 1.0);
    for (int attempt = 0; attempt < 5 && es.eigenvalues().minCoeff() < 0.0; ++attempt) {
        S.diagonal().array() += jitter;
        es.compute(S);
        jitter *= 10.0;
    }
    const Eigen::VectorXd sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd L = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().transpose();

    Rng rng(seed);
    Eigen::VectorXd xi(static_cast<Eigen::Index>(d));
    std::vector<double> mx(draws);
    for (std::size_t t = 0; t < draws; ++t) {
        for (std::size_t k = 0; k < d; ++k) xi(Eigen::Index(k)) = rng.normal();
        mx[t] = (L * xi).cwiseAbs().maxCoeff();
    }
    return EmpiricalLaw(std::move(mx)).quantile(1.0 - beta);
}

double pvalue_from_values(double observed, const std::vector<double>& reference) {
    if (reference.empty()) throw Error("p-value needs at least one replicate");
    const double m = mean_of(reference);
    const double t = std::fabs(observed - m);
    std::size_t hits = 0;
    for (double x : reference) hits += std::fabs(x - m) >= t;
    return double(1 + hits) / double(reference.size() + 1);
}

double pvalue_bootstrap(const StatisticSpec& stat, const Dataset& data,
                        const std::vector<double>& theta, std::size_t B, RngSeed seed) {
    if (theta.size() != data.d()) throw Error("theta length does not match d");
    const auto ref = bootstrap_values(stat, data, ResamplePlan::centered(theta, B), replicate_root(seed));
    return pvalue_from_values(eval(stat, data), ref);
}

std::vector<std::vector<double>> make_offset_grid(std::size_t d, double gamma, std::size_t points,
                                                  RngSeed seed) {
    std::vector<std::vector<double>> grid;
    if (d == 1) {
        if (points <= 1 || gamma == 0.0) return {{0.0}};
        for (std::size_t i = 0; i < points; ++i)
            grid.push_back({-gamma + 2.0 * gamma * double(i) / double(points - 1)});
        return grid;
    }
    grid.push_back(std::vector<double>(d, 0.0));
    for (std::size_t k = 0; k < d; ++k)
        for (double s : {-1.0, 1.0}) {
            std::vector<double> o(d, 0.0);
            o[k] = s * gamma;
            grid.push_back(o);
        }
    Rng rng(seed);
    for (std::size_t r = 0; r < 4 * d; ++r) {
        std::vector<double> o(d);
        double norm = 0.0;
        for (double& x : o) {
            x = rng.normal();
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (double& x : o) x *= gamma / norm;
        grid.push_back(o);
    }
    return grid;
}

std::string method_name(CiMethod::Kind k) {
    switch (k) {
        case CiMethod::Kind::PlainQuantile: return "plain";
        case CiMethod::Kind::Centered: return "centered";
        case CiMethod::Kind::Corrected: return "corrected";
        case CiMethod::Kind::ShiftedSup: return "shifted_sup";
        case CiMethod::Kind::Robust: return "robust";
    }
    return "?";
}

nlohmann::json to_json(const CiResult& r) {
    return {{"method", r.method},   {"alpha", r.alpha}, {"center", r.center},
            {"lo", r.lo},           {"hi", r.hi},       {"t_b", r.t_b},
            {"t_g", r.t_g},         {"t_star", r.t_star}, {"B", r.B},
            {"seed", {{"root", r.seed.root}, {"stream", r.seed.stream}}}};
}

}  // namespace bootlab
