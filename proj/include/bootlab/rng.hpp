#pragma once

#include <array>
#include <cstdint>

namespace bootlab {

struct RngSeed {
    std::uint64_t root = 0;
    std::uint64_t stream = 0;
};

// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Mixes several tags into a fresh 64-bit root (splitmix64 finalizer chain).
std::uint64_t derive_root(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

// Sequential reader over the Philox stream selected by (root, stream).
// The counter's upper 64 bits hold the stream index, the lower 64 bits the block.
class Rng {
public:
    explicit Rng(RngSeed seed);

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    // Uniform on [0,1) with 53 random bits.
    double uniform();
    // Uniform integer in [0, bound), bound > 0; Lemire's method with rejection.
    std::uint32_t below(std::uint32_t bound);
    double normal();

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace bootlab
