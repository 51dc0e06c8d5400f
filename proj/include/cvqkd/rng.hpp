#pragma once

#include <array>
#include <cstdint>

namespace cvqkd::rng {

// SplitMix64 finalizer (Steele/Lea/Vigna). Full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives an independent sub-seed for stream `stream` of a master seed.
// Used for per-column streams and for per-block sub-streams within a
// column, so generation order never depends on thread count.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(mix64(seed + 0x9E3779B97F4A7C15ULL) ^
                 mix64(stream * 0xD1B54A32D192ED03ULL + 0x8BB84B93962EACC9ULL));
}

// xoshiro256++ (Blackman/Vigna, public domain reference implementation).
// The fixed generator of this project: seedable, tiny state, and cheap to
// instantiate once per block.
class Xoshiro256pp {
public:
    explicit constexpr Xoshiro256pp(std::uint64_t seed) noexcept {
        // Seed the state through SplitMix64 as recommended by the authors.
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9E3779B97F4A7C15ULL;
            word = mix64(sm);
        }
    }

    constexpr std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [-1, 1).
    constexpr double uniform_pm1() noexcept {
        return 2.0 * uniform() - 1.0;
    }

    constexpr bool coin() noexcept { return (next() >> 63) != 0; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

} // namespace cvqkd::rng
