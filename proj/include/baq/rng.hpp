#pragma once
// Counter-based per-shot random streams. Every (seed, shot, stream) triple is
// hashed into an independent splitmix64 state, so shot k draws the same numbers
// no matter how work is split across threads, and disabling one noise source
// never shifts the draws of another.

#include <cstdint>

namespace baq {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class ShotRng {
   public:
    ShotRng(std::uint64_t seed, std::uint64_t shot, std::uint64_t stream) {
        // Mix the triple through three rounds so nearby counters decorrelate.
        std::uint64_t s = seed;
        (void)splitmix64(s);
        s ^= 0x6a09e667f3bcc909ULL + shot * 0x9e3779b97f4a7c15ULL;
        (void)splitmix64(s);
        s ^= 0xbb67ae8584caa73bULL + stream * 0xc2b2ae3d27d4eb4fULL;
        (void)splitmix64(s);
        state_ = s;
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in (0,1), 53-bit mantissa, never exactly 0.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    // Portable Box-Muller (std::normal_distribution is not bit-stable across
    // standard libraries; reproducibility from (seed, shot) is part of the API).
    double gauss();

    // Standard Cauchy via inverse CDF.
    double cauchy();

   private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace baq
