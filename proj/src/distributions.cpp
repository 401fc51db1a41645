#include "bootlab/distributions.hpp"

#include <cmath>

namespace bootlab {

namespace {

const std::pair<DistributionSpec::Kind, const char*> kNames[] = {
    {DistributionSpec::Kind::UniformUnit, "UniformUnit"},
    {DistributionSpec::Kind::StdNormal, "StdNormal"},
    {DistributionSpec::Kind::ScaledNormal, "ScaledNormal"},
    {DistributionSpec::Kind::BoundedCentered, "BoundedCentered"},
    {DistributionSpec::Kind::GaussianMatrix, "GaussianMatrix"},
    {DistributionSpec::Kind::TwoSampleGaussian, "TwoSampleGaussian"},
};

}  // namespace

std::string kind_name(DistributionSpec::Kind k) {
    for (const auto& [kk, name] : kNames)
        if (kk == k) return name;
    return "?";
}

std::vector<double> DistributionSpec::mean() const {
    using K = Kind;
    switch (kind) {
        case K::UniformUnit: return std::vector<double>(d, 0.5);
        case K::TwoSampleGaussian: {
            std::vector<double> mu(d, 0.0);
            for (std::size_t k = d / 2; k < d; ++k) mu[k] = delta;
            return mu;
        }
        case K::GaussianMatrix: return {0.0};
        default: return std::vector<double>(d, 0.0);
    }
}

std::vector<double> DistributionSpec::variance() const {
    using K = Kind;
    switch (kind) {
        case K::UniformUnit: return std::vector<double>(d, 1.0 / 12.0);
        case K::ScaledNormal: return std::vector<double>(d, sigma * sigma);
        case K::BoundedCentered: return std::vector<double>(d, c * c / 3.0);
        case K::GaussianMatrix: return {1.0};
        default: return std::vector<double>(d, 1.0);
    }
}

Dataset generate(const DistributionSpec& spec, std::size_t n, RngSeed seed) {
    using K = DistributionSpec::Kind;
    std::size_t rows = n, cols = spec.d;
    if (spec.kind == K::GaussianMatrix) {
        std::size_t m = spec.m;
        if (m == 0) {
            m = std::size_t(std::llround(std::sqrt(double(n))));
            if (m * m != n) throw Error("GaussianMatrix needs n to be a perfect square");
        }
        rows = m * m;
        cols = 1;
    }
    if (rows == 0 || cols == 0) throw Error("distribution needs n >= 1 and d >= 1");
    if (spec.kind == K::TwoSampleGaussian && cols % 2) throw Error("TwoSampleGaussian needs even d");
    if (spec.kind == K::ScaledNormal && !(spec.sigma > 0.0)) throw Error("ScaledNormal needs sigma > 0");
    if (spec.kind == K::BoundedCentered && !(spec.c > 0.0)) throw Error("BoundedCentered needs c > 0");

    Rng rng(seed);
    std::vector<double> v(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < cols; ++k) {
            double x;
            switch (spec.kind) {
                case K::UniformUnit: x = rng.uniform(); break;
                case K::ScaledNormal: x = spec.sigma * rng.normal(); break;
                case K::BoundedCentered: x = spec.c * (2.0 * rng.uniform() - 1.0); break;
                case K::TwoSampleGaussian: x = rng.normal() + (k >= cols / 2 ? spec.delta : 0.0); break;
                default: x = rng.normal(); break;
            }
            v[i * cols + k] = x;
        }
    if (spec.lattice_bits > 0) {
        const double s = std::ldexp(1.0, spec.lattice_bits);
        for (double& x : v) x = std::nearbyint(x * s) / s;
    }
    return Dataset(rows, cols, std::move(v));
}

nlohmann::json to_json(const DistributionSpec& s) {
    nlohmann::json j = {{"kind", kind_name(s.kind)}, {"d", s.d}};
    using K = DistributionSpec::Kind;
    if (s.kind == K::ScaledNormal) j["sigma"] = s.sigma;
    if (s.kind == K::BoundedCentered) j["c"] = s.c;
    if (s.kind == K::GaussianMatrix) j["m"] = s.m;
    if (s.kind == K::TwoSampleGaussian) j["delta"] = s.delta;
    if (s.lattice_bits) j["lattice_bits"] = s.lattice_bits;
    return j;
}

DistributionSpec distribution_from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object() || !j.contains("kind")) throw Error("distribution needs a 'kind'");
        DistributionSpec s;
        const std::string kind = j.at("kind").get<std::string>();
        bool found = false;
        for (const auto& [kk, name] : kNames)
            if (kind == name) {
                s.kind = kk;
                found = true;
            }
        if (!found) throw Error("unknown distribution kind '" + kind + "'");
        for (auto it = j.begin(); it != j.end(); ++it) {
            const auto& k = it.key();
            if (k == "kind") continue;
            else if (k == "d") s.d = it->get<std::size_t>();
            else if (k == "sigma") s.sigma = it->get<double>();
            else if (k == "c") s.c = it->get<double>();
            else if (k == "m") s.m = it->get<std::size_t>();
            else if (k == "delta") s.delta = it->get<double>();
            else if (k == "lattice_bits") s.lattice_bits = it->get<int>();
            else throw Error("unknown distribution key '" + k + "'");
        }
        if (s.kind == DistributionSpec::Kind::TwoSampleGaussian && !j.contains("d")) s.d = 2;
        if (s.d == 0) throw Error("distribution needs d >= 1");
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("distribution spec: ") + e.what());
    }
}

}  // namespace bootlab
