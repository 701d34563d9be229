#ifndef MMS_RNG_HPP
#define MMS_RNG_HPP

#include <cmath>
#include <cstdint>

namespace mms {

/// SplitMix64: a 64-bit counter-based generator with explicit seeding.
/// Output t for a given (seed, step count) is a pure function of both, so
/// runs are reproducible across platforms; no libstdc++ distribution objects
/// are used anywhere (their output is implementation-defined).
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1); safe as a log/Gumbel argument.
    double next_open_double() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    bool next_bool() { return (next_u64() & 1ull) != 0; }

    /// Uniform integer in [0, bound). Multiply-shift with rejection, so the
    /// result is exactly uniform and platform independent.
    uint64_t next_below(uint64_t bound) {
        if (bound <= 1) return 0;
        const uint64_t reject_below = (0 - bound) % bound;  // 2^64 mod bound
        while (true) {
            __uint128_t m = static_cast<__uint128_t>(next_u64()) * bound;
            if (static_cast<uint64_t>(m) >= reject_below)
                return static_cast<uint64_t>(m >> 64);
        }
    }

    double next_gumbel() { return -std::log(-std::log(next_open_double())); }

  private:
    uint64_t state_;
};

}  // namespace mms

#endif  // MMS_RNG_HPP
