#pragma once

// Portable, documented random streams.
//
// Seeds are expanded with SplitMix64 (Steele, Lea & Flood; constants
// 0x9E3779B97F4A7C15, 0xBF58476D1CE4E5B9, 0x94D049BB133111EB), and draws come
// from xoshiro256** 1.0 (Blackman & Vigna). The sub-seed for run i of a study is
//
//     sub_seed(master, i) = mix64(master + (i + 1) * 0x9E3779B97F4A7C15)
//
// where mix64 is the SplitMix64 output function. Bounded integers use rejection
// sampling on the top of the 64-bit range, so every platform draws the same values.

#include <array>
#include <cstdint>

namespace dsm {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}
    constexpr std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

constexpr std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + (index + 1) * kGolden);
}

class Xoshiro256StarStar {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256StarStar(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return next(); }
    std::uint64_t next();

    /// Uniform in [0, n), n >= 1.
    std::uint64_t below(std::uint64_t n);
    /// Uniform in [0, 1) with 53 random bits.
    double unit();

private:
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace dsm
