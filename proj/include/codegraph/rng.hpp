#pragma once

#include <cstdint>
#include <string_view>

namespace codegraph {

/// 64-bit FNV-1a. Used for config hashes and RNG substream tags; stable
/// across platforms, unlike std::hash.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// SplitMix64 generator with named substreams.
///
/// Every random draw in the pipeline goes through this type so that an
/// episode is a pure function of its seed. Distributions are implemented
/// here (not via <random>) because the standard distributions are not
/// bit-compatible across library implementations.
class Rng {
public:
    Rng() = default;
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Independent stream for (seed, tag), e.g. substream(seed, "executor").
    static Rng substream(std::uint64_t seed, std::string_view tag) {
        return Rng(splitmix64_mix(seed ^ fnv1a64(tag)));
    }

    /// Child stream derived from this one without advancing it.
    Rng fork(std::string_view tag) const { return Rng(splitmix64_mix(state_ ^ fnv1a64(tag))); }

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ull;
        return splitmix64_mix(state_);
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n) noexcept;

    bool bernoulli(double p) noexcept { return p > 0.0 && uniform() < p; }

    /// Standard normal via the Marsaglia polar method.
    double normal() noexcept;

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace codegraph
