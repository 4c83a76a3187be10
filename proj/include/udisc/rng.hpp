#pragma once

#include <cstdint>
#include <limits>

namespace udisc {

/// Seedable 64-bit counter-based generator (splitmix64 output function over
/// a Weyl sequence). Reproducible within a build; satisfies
/// UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Independent stream for parallel chunks: mixes the stream index into
    /// the seed through one splitmix round.
    static SplitMix64 derive(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 mixer(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
        return SplitMix64(mixer());
    }

private:
    std::uint64_t state_;
};

}  // namespace udisc
