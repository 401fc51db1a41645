#include "bootlab/statistics.hpp"

#include <algorithm>
#include <cmath>

namespace bootlab {

namespace {

double ipow(double x, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

// log sum exp(c * x_k) / c, shifted by the max; c > 0.
double soft_max(const double* x, std::size_t len, double c) {
    double mx = x[0];
    for (std::size_t k = 1; k < len; ++k) mx = std::max(mx, x[k]);
    double s = 0.0;
    for (std::size_t k = 0; k < len; ++k) s += std::exp(c * (x[k] - mx));
    return mx + std::log(s) / c;
}

std::vector<double> column_sums(const Dataset& data) {
    std::vector<double> s(data.d(), 0.0);
    for (std::size_t i = 0; i < data.n(); ++i)
        for (std::size_t k = 0; k < data.d(); ++k) s[k] += data(i, k);
    return s;
}

void need(bool ok, const std::string& msg) {
    if (!ok) throw Error(msg);
}

std::size_t grid_side(const StatisticSpec& spec, std::size_t d) {
    need(spec.p >= 1 && std::size_t(spec.p) * std::size_t(spec.p) == d,
         "MinMaxCoordMean needs d = p^2 columns");
    return std::size_t(spec.p);
}

double paired_diff_sq(const Dataset& data) {
    const std::size_t h = data.n() / 2;
    double s = 0.0;
    for (std::size_t i = 0; i < h; ++i) s += data(i, 0) - data(i + h, 0);
    s /= std::sqrt(double(data.n()));
    return s * s;
}

double product_statistic(const Dataset& data, bool centered) {
    const double n = double(data.n());
    double mean = 0.0;
    if (centered) {
        for (std::size_t i = 0; i < data.n(); ++i) mean += data(i, 0);
        mean /= n;
    }
    double prod = 1.0;
    for (std::size_t i = 0; i < data.n(); ++i) prod *= 1.0 + (data(i, 0) - mean) / n;
    return std::sqrt(n) * (prod - 1.0);
}

double spin_glass(const Dataset& data, int m) {
    need(m >= 1 && m <= 14, "SpinGlassEntropy supports 1..14 spins");
    const std::size_t mm = std::size_t(m);
    need(data.n() == mm * mm && data.d() == 1, "SpinGlassEntropy needs n = spins^2 scalar rows");
    const double scale = 1.0 / std::sqrt(double(m));
    std::vector<double> X(mm * mm);
    for (std::size_t i = 0; i < mm * mm; ++i) X[i] = data(i, 0) * scale;
    // s and -s give the same energy: fix s_0 = +1, enumerate the rest by Gray code.
    std::vector<int> s(mm, 1);
    std::vector<double> u(mm, 0.0);  // u_k = sum_b (X_kb + X_bk) s_b
    double E = 0.0;
    for (std::size_t a = 0; a < mm; ++a)
        for (std::size_t b = 0; b < mm; ++b) {
            E += X[a * mm + b];
            u[a] += X[a * mm + b] + X[b * mm + a];
        }
    double mx = E, sum = 1.0;
    const std::uint64_t count = std::uint64_t(1) << (mm - 1);
    for (std::uint64_t t = 1; t < count; ++t) {
        const std::size_t k = 1 + std::size_t(__builtin_ctzll(t));
        const double sk = s[k];
        E -= 2.0 * sk * (u[k] - 2.0 * X[k * mm + k] * sk);
        for (std::size_t j = 0; j < mm; ++j) u[j] -= 2.0 * sk * (X[j * mm + k] + X[k * mm + j]);
        s[k] = -s[k];
        if (E > mx) {
            sum = sum * std::exp(mx - E) + 1.0;
            mx = E;
        } else {
            sum += std::exp(E - mx);
        }
    }
    return (mx + std::log(sum) + std::log(2.0)) / double(m);
}

double kernel_eval(const KernelSpec& k, const double* a, const double* b, std::size_t dim) {
    switch (k.kind) {
        case KernelSpec::Kind::Gaussian: {
            double r2 = 0.0;
            for (std::size_t i = 0; i < dim; ++i) r2 += (a[i] - b[i]) * (a[i] - b[i]);
            return std::exp(-r2 / (2.0 * k.bandwidth * k.bandwidth));
        }
        case KernelSpec::Kind::Linear: {
            double s = 0.0;
            for (std::size_t i = 0; i < dim; ++i) s += a[i] * b[i];
            return s;
        }
        case KernelSpec::Kind::Polynomial: {
            double s = k.offset;
            for (std::size_t i = 0; i < dim; ++i) s += a[i] * b[i];
            return ipow(s, k.degree);
        }
    }
    return 0.0;
}

std::vector<double> h_matrix(const Dataset& data, const KernelSpec& k) {
    const std::size_t n = data.n(), h = data.d() / 2;
    std::vector<double> H(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = data.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double* xj = data.row(j);
            H[i * n + j] = kernel_eval(k, xj, xi, h) + kernel_eval(k, xj + h, xi + h, h) -
                           kernel_eval(k, xj, xi + h, h) - kernel_eval(k, xj + h, xi, h);
        }
    }
    return H;
}

void check_kernel_spec(const StatisticSpec& spec, std::size_t d) {
    need(d % 2 == 0, "KernelSoftmaxMMD needs an even number of columns");
    need(!spec.kernels.empty(), "KernelSoftmaxMMD needs at least one kernel");
    need(spec.lambda >= 0.0, "KernelSoftmaxMMD needs lambda >= 0");
}

KernelComponents combine(std::size_t n, double beta, double lambda, const std::vector<double>& sums,
                         const std::vector<double>& rowsq) {
    const double nn = double(n);
    const double lam = lambda > 0.0 ? lambda : 1e-8;
    KernelComponents out;
    for (std::size_t k = 0; k < sums.size(); ++k) {
        const double M = sums[k] / (nn * nn);
        const double den = 4.0 * rowsq[k] / (nn * nn * nn) -
                           4.0 * sums[k] * sums[k] / (nn * nn * nn * nn) + lam;
        need(den > 0.0, "kernel power proxy has a non-positive denominator");
        out.M_hat.push_back(M);
        out.p_theta.push_back(M / den);
    }
    double mx = out.p_theta[0];
    for (double p : out.p_theta) mx = std::max(mx, p);
    double z = 0.0;
    for (double p : out.p_theta) {
        out.omega.push_back(std::exp(beta * (p - mx)));
        z += out.omega.back();
    }
    for (std::size_t k = 0; k < out.omega.size(); ++k) {
        out.omega[k] /= z;
        out.T_hat += out.M_hat[k] * out.omega[k];
    }
    return out;
}

double stacked_default_beta(std::size_t n_eval) { return std::sqrt(double(n_eval)); }

}  // namespace

double KernelSpec::operator()(double a, double b) const { return kernel_eval(*this, &a, &b, 1); }

double resolved_beta(const StatisticSpec& spec, std::size_t n, std::size_t d) {
    if (spec.beta) return *spec.beta;
    const double nn = double(n);
    if (spec.kind == StatKind::MaxCoordMean) {
        const double lp = std::log(double(d));
        return lp > 0.0 ? 0.5 * std::pow(nn, 0.125) / std::sqrt(lp) : kInf;
    }
    if (spec.kind == StatKind::MinMaxCoordMean) {
        const double lp = std::log(double(spec.p));
        return lp > 0.0 ? std::pow(nn, 1.0 / 6.0) / std::pow(lp, 2.0 / 3.0) : kInf;
    }
    return 1.0;
}

bool uses_column_sums(const StatisticSpec& spec) {
    switch (spec.kind) {
        case StatKind::ScaledMeanPower:
        case StatKind::PositivePartMean:
        case StatKind::MaxCoordMean:
        case StatKind::MinMaxCoordMean:
            return true;
        default:
            return false;
    }
}

double eval_from_column_sums(const StatisticSpec& spec, std::size_t n,
                             const std::vector<double>& sums) {
    const double rn = std::sqrt(double(n));
    switch (spec.kind) {
        case StatKind::ScaledMeanPower:
            need(spec.p >= 1, "ScaledMeanPower needs p >= 1");
            return ipow(sums[0] / rn, spec.p);
        case StatKind::PositivePartMean:
            return std::max(sums[0] / rn, 0.0);
        case StatKind::MaxCoordMean: {
            std::vector<double> R(sums.size());
            for (std::size_t k = 0; k < R.size(); ++k) R[k] = sums[k] / rn;
            const double beta = resolved_beta(spec, n, R.size());
            need(beta > 0.0, "MaxCoordMean needs beta > 0");
            if (std::isinf(beta) || R.size() == 1) return *std::max_element(R.begin(), R.end());
            return soft_max(R.data(), R.size(), beta * std::log(double(R.size())));
        }
        case StatKind::MinMaxCoordMean: {
            const std::size_t p = grid_side(spec, sums.size());
            std::vector<double> R(sums.size());
            for (std::size_t k = 0; k < R.size(); ++k) R[k] = sums[k] / rn;
            const double beta = resolved_beta(spec, n, R.size());
            need(beta > 0.0, "MinMaxCoordMean needs beta > 0");
            std::vector<double> inner(p);
            if (std::isinf(beta) || p == 1) {
                for (std::size_t i = 0; i < p; ++i)
                    inner[i] = *std::max_element(R.begin() + i * p, R.begin() + (i + 1) * p);
                return *std::min_element(inner.begin(), inner.end());
            }
            const double c = beta * std::log(double(p));
            for (std::size_t i = 0; i < p; ++i) inner[i] = -soft_max(R.data() + i * p, p, c);
            return -soft_max(inner.data(), p, c);
        }
        default:
            throw Error("statistic does not reduce to column sums");
    }
}

double eval_isolated_count(const Dataset& data, double centering_c) {
    need(data.d() == 1, "IsolatedCount needs d = 1");
    need(data.n() >= 2, "IsolatedCount needs n >= 2");
    const std::size_t n = data.n();
    std::vector<double> x(data.values());
    std::sort(x.begin(), x.end());
    const double r = 1.0 / double(n);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left = i == 0 || x[i] - x[i - 1] > r;
        const bool right = i + 1 == n || x[i + 1] - x[i] > r;
        count += left && right;
    }
    return (double(count) - double(n) * centering_c) / std::sqrt(double(n));
}

KernelComponents eval_kernel_components(const Dataset& data, const StatisticSpec& spec) {
    check_kernel_spec(spec, data.d());
    const std::size_t n = data.n();
    std::vector<double> sums, rowsq;
    for (const auto& k : spec.kernels) {
        const auto H = h_matrix(data, k);
        double tot = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0;
            for (std::size_t j = 0; j < n; ++j) r += H[i * n + j];
            tot += r;
            sq += r * r;
        }
        sums.push_back(tot);
        rowsq.push_back(sq);
    }
    return combine(n, spec.beta.value_or(1.0), spec.lambda, sums, rowsq);
}

KernelGram::KernelGram(const Dataset& data, const StatisticSpec& spec)
    : n_(data.n()), beta_(spec.beta.value_or(1.0)), lambda_(spec.lambda) {
    check_kernel_spec(spec, data.d());
    for (const auto& k : spec.kernels) H_.push_back(h_matrix(data, k));
}

double KernelGram::eval(const std::vector<double>& v, const std::vector<double>& c) const {
    std::vector<double> sums, rowsq;
    for (const auto& H : H_) {
        double tot = 0.0, sq = 0.0;
        for (std::size_t a = 0; a < n_; ++a) {
            if (c[a] == 0.0) continue;
            const double* h = H.data() + a * n_;
            double hv = 0.0;
            for (std::size_t b = 0; b < n_; ++b) hv += h[b] * v[b];
            tot += v[a] * hv;
            sq += c[a] * hv * hv;
        }
        sums.push_back(tot);
        rowsq.push_back(sq);
    }
    return double(n_) * combine(n_, beta_, lambda_, sums, rowsq).T_hat;
}

StackedResult eval_stacked(const Dataset& weights_data, const Dataset& eval_data,
                           const StatisticSpec& spec) {
    need(!spec.base_predictions.empty(), "StackedRisk needs at least one base prediction");
    need(weights_data.d() == 1 && eval_data.d() == 1, "StackedRisk needs scalar observations");
    const double beta = spec.beta.value_or(stacked_default_beta(eval_data.n()));
    const std::size_t K = spec.base_predictions.size();
    std::vector<double> R(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t i = 0; i < weights_data.n(); ++i)
            R[k] += spec.loss(weights_data(i, 0), spec.base_predictions[k]);
        R[k] /= double(weights_data.n());
    }
    const double rmin = *std::min_element(R.begin(), R.end());
    StackedResult out;
    double z = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        out.weights.push_back(std::exp(-beta * (R[k] - rmin)));
        z += out.weights.back();
    }
    for (std::size_t k = 0; k < K; ++k) {
        out.weights[k] /= z;
        out.theta += spec.base_predictions[k] * out.weights[k];
    }
    for (std::size_t i = 0; i < eval_data.n(); ++i) out.risk += spec.loss(eval_data(i, 0), out.theta);
    out.risk /= std::sqrt(double(eval_data.n()));
    return out;
}

namespace {

Dataset tail_rows(const Dataset& data, std::size_t m) {
    need(m < data.n(), "StackedRisk split leaves no evaluation rows");
    std::vector<double> v(data.values().begin() + std::ptrdiff_t(m * data.d()), data.values().end());
    return Dataset(data.n() - m, data.d(), std::move(v));
}

}  // namespace

double eval(const StatisticSpec& spec, const Dataset& data) {
    if (uses_column_sums(spec)) {
        if (spec.kind != StatKind::MaxCoordMean && spec.kind != StatKind::MinMaxCoordMean)
            need(data.d() >= 1, "statistic needs at least one column");
        return eval_from_column_sums(spec, data.n(), column_sums(data));
    }
    switch (spec.kind) {
        case StatKind::ProductStatistic:
            return product_statistic(data, spec.centered);
        case StatKind::PairedDiffSq:
            return paired_diff_sq(data);
        case StatKind::ScaledMin: {
            need(data.d() == 1, "ScaledMin needs d = 1");
            double mn = data(0, 0);
            for (std::size_t i = 1; i < data.n(); ++i) mn = std::min(mn, data(i, 0));
            return double(data.n()) * mn;
        }
        case StatKind::IsolatedCount:
            return eval_isolated_count(data, spec.centering_c);
        case StatKind::SpinGlassEntropy:
            return spin_glass(data, spec.spins);
        case StatKind::KernelSoftmaxMMD:
            return double(data.n()) * eval_kernel_components(data, spec).T_hat;
        case StatKind::StackedRisk: {
            const Dataset tail = tail_rows(data, spec.split_m);
            return eval_stacked(tail, tail, spec).risk;
        }
        default:
            break;
    }
    throw Error("unhandled statistic kind");
}

// ---- JSON ----

namespace {

const std::pair<StatKind, const char*> kKindNames[] = {
    {StatKind::ScaledMeanPower, "ScaledMeanPower"},
    {StatKind::PositivePartMean, "PositivePartMean"},
    {StatKind::ProductStatistic, "ProductStatistic"},
    {StatKind::PairedDiffSq, "PairedDiffSq"},
    {StatKind::ScaledMin, "ScaledMin"},
    {StatKind::IsolatedCount, "IsolatedCount"},
    {StatKind::MaxCoordMean, "MaxCoordMean"},
    {StatKind::MinMaxCoordMean, "MinMaxCoordMean"},
    {StatKind::SpinGlassEntropy, "SpinGlassEntropy"},
    {StatKind::KernelSoftmaxMMD, "KernelSoftmaxMMD"},
    {StatKind::StackedRisk, "StackedRisk"},
};

nlohmann::json beta_json(const std::optional<double>& b) {
    if (!b) return "default";
    if (std::isinf(*b)) return "inf";
    return *b;
}

std::optional<double> beta_from(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "default") return std::nullopt;
        if (s == "inf") return kInf;
        throw Error("beta must be a number, \"inf\" or \"default\"");
    }
    const double b = j.get<double>();
    need(b >= 0.0, "beta must be non-negative");
    return b;
}

void allow_only(const nlohmann::json& params, std::initializer_list<const char*> keys,
                const std::string& kind) {
    for (auto it = params.begin(); it != params.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        need(ok, "unknown parameter '" + it.key() + "' for " + kind);
    }
}

}  // namespace

std::string kind_name(StatKind k) {
    for (const auto& [kk, name] : kKindNames)
        if (kk == k) return name;
    return "?";
}

nlohmann::json to_json(const StatisticSpec& s) {
    nlohmann::json p = nlohmann::json::object();
    switch (s.kind) {
        case StatKind::ScaledMeanPower: p["p"] = s.p; break;
        case StatKind::ProductStatistic: p["centered"] = s.centered; break;
        case StatKind::IsolatedCount: p["centering_c"] = s.centering_c; break;
        case StatKind::MaxCoordMean: p["beta"] = beta_json(s.beta); break;
        case StatKind::MinMaxCoordMean:
            p["p"] = s.p;
            p["beta"] = beta_json(s.beta);
            break;
        case StatKind::SpinGlassEntropy: p["spins"] = s.spins; break;
        case StatKind::KernelSoftmaxMMD: {
            nlohmann::json ks = nlohmann::json::array();
            for (const auto& k : s.kernels) {
                if (k.kind == KernelSpec::Kind::Gaussian)
                    ks.push_back({{"kind", "Gaussian"}, {"bandwidth", k.bandwidth}});
                else if (k.kind == KernelSpec::Kind::Linear)
                    ks.push_back({{"kind", "Linear"}});
                else
                    ks.push_back({{"kind", "Polynomial"}, {"degree", k.degree}, {"offset", k.offset}});
            }
            p["kernels"] = ks;
            p["beta"] = s.beta.value_or(1.0);
            p["lambda"] = s.lambda;
            break;
        }
        case StatKind::StackedRisk:
            p["base_predictions"] = s.base_predictions;
            p["beta"] = beta_json(s.beta);
            p["loss"] = "Square";
            p["split_m"] = s.split_m;
            break;
        default:
            break;
    }
    return {{"kind", kind_name(s.kind)}, {"params", p}};
}

StatisticSpec statistic_from_json(const nlohmann::json& j) {
    try {
        need(j.is_object() && j.contains("kind"), "statistic needs a 'kind'");
        for (auto it = j.begin(); it != j.end(); ++it)
            need(it.key() == "kind" || it.key() == "params", "unknown statistic key '" + it.key() + "'");
        const std::string kind = j.at("kind").get<std::string>();
        StatisticSpec s;
        bool found = false;
        for (const auto& [kk, name] : kKindNames)
            if (kind == name) {
                s.kind = kk;
                found = true;
            }
        need(found, "unknown statistic kind '" + kind + "'");
        const nlohmann::json p = j.value("params", nlohmann::json::object());
        need(p.is_object(), "statistic params must be an object");
        switch (s.kind) {
            case StatKind::ScaledMeanPower:
                allow_only(p, {"p"}, kind);
                s.p = p.value("p", 1);
                need(s.p >= 1, "ScaledMeanPower needs p >= 1");
                break;
            case StatKind::ProductStatistic:
                allow_only(p, {"centered"}, kind);
                s.centered = p.value("centered", false);
                break;
            case StatKind::IsolatedCount:
                allow_only(p, {"centering_c"}, kind);
                s.centering_c = p.value("centering_c", 0.0);
                break;
            case StatKind::MaxCoordMean:
                allow_only(p, {"beta"}, kind);
                if (p.contains("beta")) s.beta = beta_from(p["beta"]);
                break;
            case StatKind::MinMaxCoordMean:
                allow_only(p, {"p", "beta"}, kind);
                s.p = p.at("p").get<int>();
                need(s.p >= 1, "MinMaxCoordMean needs p >= 1");
                if (p.contains("beta")) s.beta = beta_from(p["beta"]);
                break;
            case StatKind::SpinGlassEntropy:
                allow_only(p, {"spins"}, kind);
                s.spins = p.at("spins").get<int>();
                need(s.spins >= 1 && s.spins <= 14, "SpinGlassEntropy supports 1..14 spins");
                break;
            case StatKind::KernelSoftmaxMMD:
                allow_only(p, {"kernels", "beta", "lambda"}, kind);
                for (const auto& kj : p.at("kernels")) {
                    KernelSpec k;
                    const std::string kk = kj.at("kind").get<std::string>();
                    if (kk == "Gaussian") {
                        allow_only(kj, {"kind", "bandwidth"}, "Gaussian kernel");
                        k.kind = KernelSpec::Kind::Gaussian;
                        k.bandwidth = kj.at("bandwidth").get<double>();
                        need(k.bandwidth > 0.0, "Gaussian bandwidth must be positive");
                    } else if (kk == "Linear") {
                        allow_only(kj, {"kind"}, "Linear kernel");
                        k.kind = KernelSpec::Kind::Linear;
                    } else if (kk == "Polynomial") {
                        allow_only(kj, {"kind", "degree", "offset"}, "Polynomial kernel");
                        k.kind = KernelSpec::Kind::Polynomial;
                        k.degree = kj.value("degree", 2);
                        k.offset = kj.value("offset", 1.0);
                    } else {
                        throw Error("unknown kernel kind '" + kk + "'");
                    }
                    s.kernels.push_back(k);
                }
                need(!s.kernels.empty(), "KernelSoftmaxMMD needs at least one kernel");
                s.beta = p.value("beta", 1.0);
                s.lambda = p.value("lambda", 1e-8);
                need(s.lambda >= 0.0, "lambda must be >= 0");
                break;
            case StatKind::StackedRisk:
                allow_only(p, {"base_predictions", "beta", "loss", "split_m"}, kind);
                s.base_predictions = p.at("base_predictions").get<std::vector<double>>();
                need(!s.base_predictions.empty(), "StackedRisk needs base predictions");
                if (p.contains("beta")) s.beta = beta_from(p["beta"]);
                need(p.value("loss", std::string("Square")) == "Square", "only Square loss is supported");
                s.split_m = p.value("split_m", std::size_t(0));
                break;
            default:
                allow_only(p, {}, kind);
                break;
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("statistic spec: ") + e.what());
    }
}

}  // namespace bootlab
