#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bootlab/rng.hpp"

namespace bootlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// n x d table of finite reals, row-major. Immutable after construction.
class Dataset {
public:
    Dataset(std::size_t n, std::size_t d, std::vector<double> values);
    static Dataset column(std::vector<double> values);

    std::size_t n() const { return n_; }
    std::size_t d() const { return d_; }
    double operator()(std::size_t i, std::size_t k) const { return v_[i * d_ + k]; }
    const double* row(std::size_t i) const { return v_.data() + i * d_; }
    const std::vector<double>& values() const { return v_; }

    bool operator==(const Dataset& o) const { return n_ == o.n_ && d_ == o.d_ && v_ == o.v_; }

private:
    std::size_t n_, d_;
    std::vector<double> v_;
};

struct ResamplePlan {
    enum class Mode { Empirical, Centered, Shifted, PairPermuted };
    Mode mode = Mode::Empirical;
    std::vector<double> vec;  // known mean (Centered) or offset (Shifted)
    std::size_t B = 1;

    static ResamplePlan empirical(std::size_t B) { return {Mode::Empirical, {}, B}; }
    static ResamplePlan centered(std::vector<double> mean, std::size_t B) {
        return {Mode::Centered, std::move(mean), B};
    }
    static ResamplePlan shifted(std::vector<double> offset, std::size_t B) {
        return {Mode::Shifted, std::move(offset), B};
    }
    static ResamplePlan pair_permuted(std::size_t B) { return {Mode::PairPermuted, {}, B}; }
};

// n bootstrap row indices for one replicate.
std::vector<std::uint32_t> draw_indices(std::size_t n, RngSeed seed);

Dataset resample_empirical(const Dataset& data, RngSeed seed);
Dataset resample_centered(const Dataset& data, const std::vector<double>& known_mean,
                          RngSeed seed);
Dataset shift(const Dataset& data, const std::vector<double>& offset);
Dataset permute_pairs(const Dataset& data, RngSeed seed);
std::vector<double> column_mean(const Dataset& data);

// One replicate of `plan`. PairPermuted bootstraps first, then swaps blocks.
Dataset resample(const Dataset& data, const ResamplePlan& plan, RngSeed seed);

// Per-replicate offset added to every row: known_mean - column_mean (Centered),
// the offset (Shifted), zero otherwise.
std::vector<double> plan_offset(const Dataset& data, const ResamplePlan& plan);

Dataset read_csv(const std::string& path);
void write_csv(const Dataset& data, const std::string& path);
Dataset read_binary(const std::string& path);
void write_binary(const Dataset& data, const std::string& path);

}  // namespace bootlab
