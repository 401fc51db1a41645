#include "bootlab/metric.hpp"

#include <algorithm>
#include <cmath>

#include "bootlab/core.hpp"

namespace bootlab {

EmpiricalLaw::EmpiricalLaw(std::vector<double> values) : v_(std::move(values)) {
    if (v_.empty()) throw Error("empirical law must be non-empty");
    std::sort(v_.begin(), v_.end());
}

double EmpiricalLaw::mean() const {
    double s = 0.0;
    for (double x : v_) s += x;
    return s / double(v_.size());
}

double EmpiricalLaw::quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw Error("quantile level must lie in [0,1]");
    // Guard against q*n landing just above an integer through rounding of q.
    const double t = q * double(v_.size());
    const double pos = std::ceil(t - 1e-9 * t);
    const std::size_t k = pos < 1.0 ? 0 : std::min(v_.size() - 1, std::size_t(pos) - 1);
    return v_[k];
}

double EmpiricalLaw::cdf(double x) const {
    return double(std::upper_bound(v_.begin(), v_.end(), x) - v_.begin()) / double(v_.size());
}

EmpiricalLaw EmpiricalLaw::centered() const { return shifted(-mean()); }

EmpiricalLaw EmpiricalLaw::shifted(double c) const {
    std::vector<double> w(v_);
    for (double& x : w) x += c;
    return EmpiricalLaw(std::move(w));
}

namespace {

// CDF of S/eps where S is a sum of three U(0,eps), and its derivatives, at u = t/eps.
double irwin_hall3(double u, int order) {
    if (u <= 0.0) return 0.0;
    if (u >= 3.0) return order == 0 ? 1.0 : 0.0;
    switch (order) {
        case 0:
            if (u < 1.0) return u * u * u / 6.0;
            if (u < 2.0) return (-2.0 * u * u * u + 9.0 * u * u - 9.0 * u + 3.0) / 6.0;
            return 1.0 - (3.0 - u) * (3.0 - u) * (3.0 - u) / 6.0;
        case 1:
            if (u < 1.0) return u * u / 2.0;
            if (u < 2.0) return -u * u + 3.0 * u - 1.5;
            return (3.0 - u) * (3.0 - u) / 2.0;
        case 2:
            if (u < 1.0) return u;
            if (u < 2.0) return 3.0 - 2.0 * u;
            return u - 3.0;
        default:
            if (u < 1.0) return 1.0;
            if (u < 2.0) return -2.0;
            return 1.0;
    }
}

double fs(double t, double eps, int order) {
    return irwin_hall3(t / eps, order) / std::pow(eps, order);
}

}  // namespace

double smoothed_indicator(double x, double a, double b, double eps) {
    return smoothed_indicator_derivative(x, a, b, eps, 0);
}

double smoothed_indicator_derivative(double x, double a, double b, double eps, int order) {
    if (!(eps > 0.0)) throw Error("smoothed indicator needs eps > 0");
    if (!(a < b)) throw Error("smoothed indicator needs a < b");
    const double left = std::isinf(a) ? (order == 0 ? 1.0 : 0.0) : fs(x - a, eps, order);
    return left - fs(x - b, eps, order);
}

double DictEntry::operator()(double x, double center) const { return derivative(x, center, 0); }

double DictEntry::derivative(double x, double center, int order) const {
    const double r = x - center;
    if (family == Family::SmoothedIndicator)
        return scale * smoothed_indicator_derivative(r, lo, hi, eps, order);
    const double w = std::pow(omega, order);
    const double t = omega * r + phi;
    switch (order % 4) {
        case 0: return scale * std::sin(t);
        case 1: return scale * w * std::cos(t);
        case 2: return -scale * w * std::sin(t);
        default: return -scale * w * std::cos(t);
    }
}

TestDictionary default_dictionary(const EmpiricalLaw& a, const EmpiricalLaw& b) {
    // Merging the sorted values makes the pooled sums independent of argument order.
    std::vector<double> pooled(a.size() + b.size());
    std::merge(a.values().begin(), a.values().end(), b.values().begin(), b.values().end(), pooled.begin());
    double center = 0.0;
    for (double x : pooled) center += x;
    center /= double(pooled.size());
    for (double& x : pooled) x -= center;
    const EmpiricalLaw rel(std::move(pooled));
    double var = 0.0;
    for (double x : rel.values()) var += x * x;
    const double sd = std::sqrt(var / double(rel.size()));
    const double iqr = rel.quantile(0.75) - rel.quantile(0.25);

    TestDictionary dict;
    dict.center = center;
    for (double f : {0.05, 0.15, 0.5}) {
        const double eps = iqr > 0.0 ? f * iqr : 1e-3;
        const double scale = 1.0 / std::max({0.75 / eps, 1.0 / (eps * eps), 2.0 / (eps * eps * eps)});
        for (int k = 2; k <= 18; ++k) {
            DictEntry e;
            e.family = DictEntry::Family::SmoothedIndicator;
            e.lo = -std::numeric_limits<double>::infinity();
            e.hi = rel.quantile(double(k) / 20.0);
            e.eps = eps;
            e.scale = scale;
            dict.entries.push_back(e);
        }
    }
    for (double w0 : {0.5, 1.0, 2.0, 4.0}) {
        const double w = sd > 0.0 ? w0 / sd : w0;
        for (double phi : {0.0, M_PI / 2}) {
            DictEntry e;
            e.family = DictEntry::Family::ScaledSinusoid;
            e.omega = w;
            e.phi = phi;
            e.scale = 1.0 / std::max({w, w * w, w * w * w});
            dict.entries.push_back(e);
        }
    }
    return dict;
}

double estimate_df(const EmpiricalLaw& a, const EmpiricalLaw& b, const TestDictionary& dict) {
    if (dict.entries.empty()) throw Error("empty test dictionary");
    double best = 0.0;
    for (const auto& e : dict.entries) {
        double ma = 0.0, mb = 0.0;
        for (double x : a.values()) ma += e(x, dict.center);
        for (double x : b.values()) mb += e(x, dict.center);
        best = std::max(best, std::fabs(ma / double(a.size()) - mb / double(b.size())));
    }
    return best;
}

double estimate_df(const EmpiricalLaw& a, const EmpiricalLaw& b) {
    return estimate_df(a, b, default_dictionary(a, b));
}

double ks_distance(const EmpiricalLaw& a, const EmpiricalLaw& b) {
    const auto& x = a.values();
    const auto& y = b.values();
    std::size_t i = 0, j = 0;
    double best = 0.0;
    while (i < x.size() || j < y.size()) {
        double t;
        if (j == y.size() || (i < x.size() && x[i] <= y[j]))
            t = x[i];
        else
            t = y[j];
        while (i < x.size() && x[i] <= t) ++i;
        while (j < y.size() && y[j] <= t) ++j;
        best = std::max(best, std::fabs(double(i) / double(x.size()) - double(j) / double(y.size())));
    }
    return best;
}

double ks_uniform(const EmpiricalLaw& a) {
    const auto& x = a.values();
    const double n = double(x.size());
    double best = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = std::clamp(x[i], 0.0, 1.0);
        best = std::max({best, double(i + 1) / n - u, u - double(i) / n});
    }
    return best;
}

nlohmann::json to_json(const TestDictionary& dict) {
    nlohmann::json out;
    out["center_rule"] = "PooledMean";
    out["center"] = dict.center;
    auto& arr = out["entries"] = nlohmann::json::array();
    for (const auto& e : dict.entries) {
        if (e.family == DictEntry::Family::SmoothedIndicator)
            arr.push_back({{"family", "SmoothedIndicator"},
                           {"interval", {std::isinf(e.lo) ? nlohmann::json("-inf") : nlohmann::json(e.lo), e.hi}},
                           {"eps", e.eps},
                           {"scale", e.scale}});
        else
            arr.push_back({{"family", "ScaledSinusoid"}, {"omega", e.omega}, {"phi", e.phi}, {"scale", e.scale}});
    }
    return out;
}

}  // namespace bootlab
