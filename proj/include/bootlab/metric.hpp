#pragma once

#include <vector>

#include <json.hpp>

namespace bootlab {

// Sorted sample of statistic values with uniform weights.
class EmpiricalLaw {
public:
    explicit EmpiricalLaw(std::vector<double> values);

    const std::vector<double>& values() const { return v_; }
    std::size_t size() const { return v_.size(); }
    double mean() const;
    // Type-1 quantile: smallest x with F(x) >= q.
    double quantile(double q) const;
    // Right-continuous ECDF.
    double cdf(double x) const;
    EmpiricalLaw centered() const;
    EmpiricalLaw shifted(double c) const;

private:
    std::vector<double> v_;
};

// Smoothed indicator of [a,b] (a may be -inf): F_S(x-a) - F_S(x-b) with F_S the CDF
// of the sum of three U(0,eps).
double smoothed_indicator(double x, double a, double b, double eps);
double smoothed_indicator_derivative(double x, double a, double b, double eps, int order);

struct DictEntry {
    enum class Family { SmoothedIndicator, ScaledSinusoid };
    Family family = Family::SmoothedIndicator;
    // SmoothedIndicator: interval [lo, hi] relative to the pooled mean, lo may be -inf.
    double lo = 0.0, hi = 0.0, eps = 1.0;
    // ScaledSinusoid: A sin(omega (x - center) + phi).
    double omega = 1.0, phi = 0.0;
    double scale = 1.0;  // multiplies the raw function so all three derivatives are <= 1

    double operator()(double x, double center) const;
    double derivative(double x, double center, int order) const;
};

struct TestDictionary {
    std::vector<DictEntry> entries;
    double center = 0.0;  // pooled mean of the laws the dictionary was built for
};

// Default dictionary anchored on the pooled sample of a and b.
TestDictionary default_dictionary(const EmpiricalLaw& a, const EmpiricalLaw& b);

double estimate_df(const EmpiricalLaw& a, const EmpiricalLaw& b, const TestDictionary& dict);
// Builds the default dictionary from a and b, then estimates.
double estimate_df(const EmpiricalLaw& a, const EmpiricalLaw& b);

double ks_distance(const EmpiricalLaw& a, const EmpiricalLaw& b);
// One-sample KS distance to U[0,1].
double ks_uniform(const EmpiricalLaw& a);

nlohmann::json to_json(const TestDictionary& dict);

}  // namespace bootlab
