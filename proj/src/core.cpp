#include "bootlab/core.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bootlab {

Dataset::Dataset(std::size_t n, std::size_t d, std::vector<double> values)
    : n_(n), d_(d), v_(std::move(values)) {
    if (n_ == 0 || d_ == 0) throw Error("dataset must have n >= 1 and d >= 1");
    if (v_.size() != n_ * d_) throw Error("dataset value count does not match n*d");
    for (double x : v_)
        if (!std::isfinite(x)) throw Error("dataset contains a non-finite value");
}

Dataset Dataset::column(std::vector<double> values) {
    const std::size_t n = values.size();
    return Dataset(n, 1, std::move(values));
}

std::vector<std::uint32_t> draw_indices(std::size_t n, RngSeed seed) {
    Rng rng(seed);
    std::vector<std::uint32_t> idx(n);
    for (auto& i : idx) i = rng.below(std::uint32_t(n));
    return idx;
}

namespace {

void check_dim(const Dataset& data, const std::vector<double>& v, const char* what) {
    if (v.size() != data.d())
        throw Error(std::string(what) + " length " + std::to_string(v.size()) +
                    " does not match d=" + std::to_string(data.d()));
}

Dataset gather(const Dataset& data, const std::vector<std::uint32_t>& idx,
               const std::vector<double>* offset) {
    const std::size_t n = data.n(), d = data.d();
    std::vector<double> out(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        const double* src = data.row(idx[i]);
        double* dst = out.data() + i * d;
        if (offset)
            for (std::size_t k = 0; k < d; ++k) dst[k] = src[k] + (*offset)[k];
        else
            std::memcpy(dst, src, d * sizeof(double));
    }
    return Dataset(n, d, std::move(out));
}

void swap_blocks(std::vector<double>& v, std::size_t n, std::size_t d, Rng& rng) {
    const std::size_t h = d / 2;
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.next_u32() >> 31) {
            double* r = v.data() + i * d;
            for (std::size_t k = 0; k < h; ++k) std::swap(r[k], r[k + h]);
        }
    }
}

}  // namespace

Dataset resample_empirical(const Dataset& data, RngSeed seed) {
    return gather(data, draw_indices(data.n(), seed), nullptr);
}

std::vector<double> column_mean(const Dataset& data) {
    std::vector<double> m(data.d(), 0.0);
    for (std::size_t i = 0; i < data.n(); ++i)
        for (std::size_t k = 0; k < data.d(); ++k) m[k] += data(i, k);
    for (double& x : m) x /= double(data.n());
    return m;
}

Dataset resample_centered(const Dataset& data, const std::vector<double>& known_mean,
                          RngSeed seed) {
    check_dim(data, known_mean, "known_mean");
    return resample(data, ResamplePlan::centered(known_mean, 1), seed);
}

Dataset shift(const Dataset& data, const std::vector<double>& offset) {
    check_dim(data, offset, "offset");
    std::vector<double> out(data.values());
    for (std::size_t i = 0; i < data.n(); ++i)
        for (std::size_t k = 0; k < data.d(); ++k) out[i * data.d() + k] += offset[k];
    return Dataset(data.n(), data.d(), std::move(out));
}

Dataset permute_pairs(const Dataset& data, RngSeed seed) {
    if (data.d() % 2) throw Error("permute_pairs needs an even number of columns");
    Rng rng(seed);
    std::vector<double> out(data.values());
    swap_blocks(out, data.n(), data.d(), rng);
    return Dataset(data.n(), data.d(), std::move(out));
}

std::vector<double> plan_offset(const Dataset& data, const ResamplePlan& plan) {
    std::vector<double> off(data.d(), 0.0);
    if (plan.mode == ResamplePlan::Mode::Centered) {
        check_dim(data, plan.vec, "known_mean");
        const auto m = column_mean(data);
        for (std::size_t k = 0; k < off.size(); ++k) off[k] = plan.vec[k] - m[k];
    } else if (plan.mode == ResamplePlan::Mode::Shifted) {
        check_dim(data, plan.vec, "offset");
        off = plan.vec;
    }
    return off;
}

Dataset resample(const Dataset& data, const ResamplePlan& plan, RngSeed seed) {
    using M = ResamplePlan::Mode;
    if (plan.mode == M::Empirical) return resample_empirical(data, seed);
    if (plan.mode == M::PairPermuted) {
        if (data.d() % 2) throw Error("permute_pairs needs an even number of columns");
        Rng rng(seed);
        std::vector<std::uint32_t> idx(data.n());
        for (auto& i : idx) i = rng.below(std::uint32_t(data.n()));
        Dataset z = gather(data, idx, nullptr);
        std::vector<double> v(z.values());
        swap_blocks(v, z.n(), z.d(), rng);
        return Dataset(z.n(), z.d(), std::move(v));
    }
    const auto off = plan_offset(data, plan);
    return gather(data, draw_indices(data.n(), seed), &off);
}

namespace {

std::string fmt_double(double x) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

}  // namespace

Dataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error("empty csv: " + path);
    std::size_t d = 1;
    for (char c : line) d += c == ',';
    std::vector<double> v;
    std::size_t n = 0, lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t fields = 0;
        const char* p = line.data();
        const char* end = p + line.size();
        while (true) {
            double x;
            auto r = std::from_chars(p, end, x);
            if (r.ec != std::errc()) throw Error(path + ":" + std::to_string(lineno) + ": bad number");
            v.push_back(x);
            ++fields;
            p = r.ptr;
            if (p == end) break;
            if (*p != ',') throw Error(path + ":" + std::to_string(lineno) + ": expected ','");
            ++p;
        }
        if (fields != d)
            throw Error(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(d) +
                        " fields");
        ++n;
    }
    return Dataset(n, d, std::move(v));
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    for (std::size_t k = 0; k < data.d(); ++k) out << (k ? ",x" : "x") << k;
    out << '\n';
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t k = 0; k < data.d(); ++k) out << (k ? "," : "") << fmt_double(data(i, k));
        out << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

namespace {

void put_u64(std::ostream& out, std::uint64_t x) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)(x >> (8 * i));
    out.write(reinterpret_cast<char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw Error("truncated binary dataset");
    std::uint64_t x = 0;
    for (int i = 7; i >= 0; --i) x = (x << 8) | b[i];
    return x;
}

}  // namespace

Dataset read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    const std::uint64_t n = get_u64(in), d = get_u64(in);
    if (n == 0 || d == 0 || n > (1ull << 40) / d) throw Error("bad binary header in " + path);
    std::vector<double> v(n * d);
    for (auto& x : v) {
        std::uint64_t bits = get_u64(in);
        std::memcpy(&x, &bits, 8);
    }
    return Dataset(n, d, std::move(v));
}

void write_binary(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    put_u64(out, data.n());
    put_u64(out, data.d());
    for (double x : data.values()) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, 8);
        put_u64(out, bits);
    }
    if (!out) throw Error("write failed: " + path);
}

}  // namespace bootlab
