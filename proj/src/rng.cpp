#include "bootlab/rng.hpp"

#include <cmath>

namespace bootlab {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
    for (int r = 0; r < 10; ++r) {
        const std::uint64_t p0 = std::uint64_t(kMulA) * c[0];
        const std::uint64_t p1 = std::uint64_t(kMulB) * c[2];
        c = {std::uint32_t(p1 >> 32) ^ c[1] ^ k[0], std::uint32_t(p1),
             std::uint32_t(p0 >> 32) ^ c[3] ^ k[1], std::uint32_t(p0)};
        k[0] += kWeylA;
        k[1] += kWeylB;
    }
    return c;
}

std::uint64_t derive_root(std::uint64_t root, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
    std::uint64_t h = splitmix(root);
    h = splitmix(h ^ a);
    h = splitmix(h ^ b);
    return splitmix(h ^ c);
}

Rng::Rng(RngSeed seed)
    : key_{std::uint32_t(seed.root), std::uint32_t(seed.root >> 32)}, stream_(seed.stream) {}

void Rng::refill() {
    buf_ = philox4x32({std::uint32_t(block_), std::uint32_t(block_ >> 32),
                       std::uint32_t(stream_), std::uint32_t(stream_ >> 32)},
                      key_);
    ++block_;
    pos_ = 0;
}

std::uint32_t Rng::next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
}

double Rng::uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

std::uint32_t Rng::below(std::uint32_t bound) {
    std::uint64_t m = std::uint64_t(next_u32()) * bound;
    auto low = std::uint32_t(m);
    if (low < bound) {
        const std::uint32_t threshold = (0u - bound) % bound;
        while (low < threshold) {
            m = std::uint64_t(next_u32()) * bound;
            low = std::uint32_t(m);
        }
    }
    return std::uint32_t(m >> 32);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

}  // namespace bootlab
