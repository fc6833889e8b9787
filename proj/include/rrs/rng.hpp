#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace rrs {

/// Identifies one deterministic random stream. Equal (seed, stream) pairs
/// produce identical draw sequences on every platform: the generator below
/// is fully specified in-repo and uses only 64-bit integer arithmetic.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

namespace detail {

struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

/// xoshiro256** seeded through SplitMix64. The stream id is folded into the
/// SplitMix state with an odd multiplier, so distinct (seed, stream) pairs
/// start from distinct states.
class Rng {
public:
    explicit Rng(RngStream s) : Rng(s.seed, s.stream) {}

    Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        detail::SplitMix64 root{seed};
        detail::SplitMix64 leaf{root.next() + 0x9E3779B97F4A7C15ULL * stream};
        for (auto& w : state_) w = leaf.next();
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
            state_[0] = 0x9E3779B97F4A7C15ULL; // all-zero state is a fixed point
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1): 53-bit mantissa fraction of the raw output.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the paired draw is cached.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace rrs
