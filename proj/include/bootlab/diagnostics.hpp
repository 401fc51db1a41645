#pragma once

#include <functional>
#include <vector>

#include "bootlab/core.hpp"
#include "bootlab/distributions.hpp"
#include "bootlab/statistics.hpp"

namespace bootlab {

using DataGenerator = std::function<Dataset(std::size_t n, RngSeed seed)>;

DataGenerator generator_for(const DistributionSpec& spec);

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

// L3 norm of g(X) - g(X with row 1 set to the zero vector), over `trials` fresh datasets.
double first_order_stability(const StatisticSpec& stat, const DataGenerator& gen, std::size_t n,
                             std::size_t trials, RngSeed seed);

// Least-squares slope of log(values) against log(ns).
double fit_rate_exponent(const std::vector<double>& ns, const std::vector<double>& values);

// |mean_b g(Z_b) - mean_b g(Y_b + Xbar - mu)| with Z_b bootstrap and Y_b fresh draws.
Estimate conditional_mean_gap_detail(const StatisticSpec& stat, const Dataset& data,
                                     const DistributionSpec& dist, std::size_t B, RngSeed seed);
double conditional_mean_gap(const StatisticSpec& stat, const Dataset& data,
                            const DistributionSpec& dist, std::size_t B, RngSeed seed);

// E sup over grid offsets x (|x| <= radius) of |g(X + x/sqrt n) - g(X) - E[g(X + x/sqrt n) - g(X)]|.
// The inner expectation comes from `inner` extra datasets per offset.
Estimate uniform_perturbation_sensitivity_detail(const StatisticSpec& stat, const DataGenerator& gen,
                                                 std::size_t n, double radius, std::size_t grid_size,
                                                 std::size_t trials, RngSeed seed,
                                                 std::size_t inner = 200);
double uniform_perturbation_sensitivity(const StatisticSpec& stat, const DataGenerator& gen,
                                        std::size_t n, double radius, std::size_t grid_size,
                                        std::size_t trials, RngSeed seed, std::size_t inner = 200);

}  // namespace bootlab
