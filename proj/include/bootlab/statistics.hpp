#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bootlab/core.hpp"

namespace bootlab {

enum class StatKind {
    ScaledMeanPower,
    PositivePartMean,
    ProductStatistic,
    PairedDiffSq,
    ScaledMin,
    IsolatedCount,
    MaxCoordMean,
    MinMaxCoordMean,
    SpinGlassEntropy,
    KernelSoftmaxMMD,
    StackedRisk,
};

struct KernelSpec {
    enum class Kind { Gaussian, Linear, Polynomial };
    Kind kind = Kind::Gaussian;
    double bandwidth = 1.0;  // Gaussian
    int degree = 2;          // Polynomial
    double offset = 1.0;     // Polynomial

    double operator()(double a, double b) const;
};

struct LossSpec {
    enum class Kind { Square };
    Kind kind = Kind::Square;
    double operator()(double x, double theta) const { return (x - theta) * (x - theta); }
};

constexpr double kInf = std::numeric_limits<double>::infinity();

struct StatisticSpec {
    StatKind kind = StatKind::ScaledMeanPower;
    int p = 1;                     // ScaledMeanPower exponent; MinMaxCoordMean grid side
    bool centered = false;         // ProductStatistic: mean-centred variant
    double centering_c = 0.0;      // IsolatedCount
    std::optional<double> beta;    // softmax temperature; empty means the n-dependent default
    int spins = 1;                 // SpinGlassEntropy
    std::vector<KernelSpec> kernels;
    double lambda = 1e-8;
    std::vector<double> base_predictions;  // StackedRisk constants
    std::size_t split_m = 0;               // StackedRisk: rows [0,m) held out from the risk
    LossSpec loss;
};

// Resolved temperature for MaxCoordMean / MinMaxCoordMean at sample size n.
double resolved_beta(const StatisticSpec& spec, std::size_t n, std::size_t d);

double eval(const StatisticSpec& spec, const Dataset& data);

double eval_isolated_count(const Dataset& data, double centering_c);

struct KernelComponents {
    std::vector<double> M_hat, p_theta, omega;
    double T_hat = 0.0;
};
KernelComponents eval_kernel_components(const Dataset& data, const StatisticSpec& spec);

struct StackedResult {
    std::vector<double> weights;
    double theta = 0.0;  // ensemble prediction
    double risk = 0.0;
};
StackedResult eval_stacked(const Dataset& weights_data, const Dataset& eval_data,
                           const StatisticSpec& spec);

// Statistics that depend on the data only through (n, column sums).
bool uses_column_sums(const StatisticSpec& spec);
double eval_from_column_sums(const StatisticSpec& spec, std::size_t n,
                             const std::vector<double>& sums);

// Precomputed H matrices of the kernel statistic for one dataset. A resample is
// described by per-original-row signed counts v (unswapped minus swapped) and
// total counts c; this evaluates n*T_hat of that resample without rebuilding Gram matrices.
class KernelGram {
public:
    KernelGram(const Dataset& data, const StatisticSpec& spec);
    double eval(const std::vector<double>& v, const std::vector<double>& c) const;
    std::size_t n() const { return n_; }

private:
    std::size_t n_;
    double beta_, lambda_;
    std::vector<std::vector<double>> H_;
};

nlohmann::json to_json(const StatisticSpec& spec);
StatisticSpec statistic_from_json(const nlohmann::json& j);
std::string kind_name(StatKind k);

}  // namespace bootlab
