#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bootlab/core.hpp"
#include "bootlab/metric.hpp"
#include "bootlab/statistics.hpp"

namespace bootlab {

// Uncentered values g(Z_b), b < plan.B; replicate b uses stream b of `root`.
std::vector<double> bootstrap_values(const StatisticSpec& stat, const Dataset& data,
                                     const ResamplePlan& plan, std::uint64_t root);

// Values of g(Z_b + offset) for every offset, reusing one set of empirical resamples.
// Result is indexed [offset][b].
std::vector<std::vector<double>> bootstrap_values_shifted(const StatisticSpec& stat,
                                                          const Dataset& data,
                                                          const std::vector<std::vector<double>>& offsets,
                                                          std::size_t B, std::uint64_t root);

struct BootstrapLaw {
    EmpiricalLaw law;  // centered values g(Z_b) - mean
    double mean = 0.0;
    std::vector<double> raw;  // uncentered values in replicate order
};

BootstrapLaw bootstrap_law(const StatisticSpec& stat, const Dataset& data, const ResamplePlan& plan,
                           RngSeed seed);

// (1 - level) quantile of |x - center| over the values.
double abs_quantile(const std::vector<double>& values, double center, double level);

struct CiMethod {
    enum class Kind { PlainQuantile, Centered, Corrected, ShiftedSup, Robust };
    Kind kind = Kind::PlainQuantile;
    std::vector<double> known_mean;      // Centered
    std::optional<double> anchor;        // Centered: symmetric interval around |g(Z~) - anchor|
    double holder_C = 0.0;               // Corrected
    double holder_alpha = 1.0;           // Corrected
    std::size_t gauss_draws = 10000;     // Corrected
    double gamma = 0.0;                  // ShiftedSup radius (informational; grid is authoritative)
    std::vector<std::vector<double>> grid;  // ShiftedSup offsets / Robust candidate means
};

struct CiRequest {
    StatisticSpec statistic;
    Dataset data;
    std::size_t B = 1000;
    double alpha = 0.05;
    CiMethod method;
    RngSeed seed;
};

struct CiResult {
    std::string method;
    double alpha = 0.05;
    double center = 0.0;
    double lo = 0.0, hi = 0.0;
    double bootstrap_mean = 0.0;
    double t_b = 0.0, t_g = 0.0, t_star = 0.0;
    std::size_t B = 0;
    RngSeed seed;
    std::vector<double> replicates;  // uncentered g(Z_b) behind the interval (first offset for sup methods)
    double half_width() const { return 0.5 * (hi - lo); }
};

CiResult ci_plain(const CiRequest& req);
CiResult ci_centered(const CiRequest& req);
CiResult ci_corrected(const CiRequest& req);
CiResult ci_shifted_sup(const CiRequest& req);
CiResult ci_robust(const CiRequest& req);
// Dispatches on req.method.kind.
CiResult build_ci(const CiRequest& req);

double gaussian_max_quantile(const Dataset& cov_source, double beta, std::size_t draws, RngSeed seed);

// Add-one bootstrap p-value with the Z^theta = Z - Xbar + theta reference law.
double pvalue_bootstrap(const StatisticSpec& stat, const Dataset& data,
                        const std::vector<double>& theta, std::size_t B, RngSeed seed);
// Same rule with an arbitrary reference plan.
double pvalue_from_values(double observed, const std::vector<double>& reference);

// Offset grid for ShiftedSup: d = 1 gives `points` equispaced offsets on [-gamma, gamma];
// d >= 2 gives the 2d axis extremes plus 4d random directions at radius gamma.
std::vector<std::vector<double>> make_offset_grid(std::size_t d, double gamma, std::size_t points,
                                                  RngSeed seed);

nlohmann::json to_json(const CiResult& r);
std::string method_name(CiMethod::Kind k);

}  // namespace bootlab
