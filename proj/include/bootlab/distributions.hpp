#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bootlab/core.hpp"

namespace bootlab {

struct DistributionSpec {
    enum class Kind { UniformUnit, StdNormal, ScaledNormal, BoundedCentered, GaussianMatrix, TwoSampleGaussian };
    Kind kind = Kind::StdNormal;
    std::size_t d = 1;      // columns; TwoSampleGaussian uses d/2 per block
    double sigma = 1.0;     // ScaledNormal
    double c = 1.0;         // BoundedCentered: uniform on [-c, c]
    std::size_t m = 0;      // GaussianMatrix side; 0 means sqrt(n)
    double delta = 0.0;     // TwoSampleGaussian: mean shift of the second block
    int lattice_bits = 0;   // > 0 rounds every value to a multiple of 2^-bits

    std::vector<double> mean() const;
    std::vector<double> variance() const;
};

// n rows of the law; deterministic per seed. GaussianMatrix returns m^2 scalar rows.
Dataset generate(const DistributionSpec& spec, std::size_t n, RngSeed seed);

nlohmann::json to_json(const DistributionSpec& spec);
DistributionSpec distribution_from_json(const nlohmann::json& j);
std::string kind_name(DistributionSpec::Kind k);

}  // namespace bootlab
