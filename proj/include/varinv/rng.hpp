#pragma once
#include <cstdint>

namespace varinv {

/// splitmix64: the standard 64-bit mixing generator (Steele/Lea/Flood
/// finalizer).  Chosen over <random> engines because the stream, and the
/// uniform-double mapping below, are pinned down bit-for-bit on every
/// platform; all sampling in the toolkit must replay exactly from a seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1), 53 mantissa bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.  Modulo bias is irrelevant at
    /// the range sizes used here (single digits).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

/// Derives an independent substream seed, so sample k of a run depends only
/// on (seed, k) and parallel evaluation order cannot matter.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    return g.next();
}

} // namespace varinv
