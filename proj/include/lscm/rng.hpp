// SPDX-License-Identifier: Apache-2.0
//
// lscm - localized statistical channel modeling toolkit
//
// Counter-based random number generator. Each draw is a pure function of
// (key, counter), so a stream keyed by (seed, trial, beam) produces the same
// sequence regardless of how work is scheduled across threads.

#ifndef lscm_rng_hpp
#define lscm_rng_hpp

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "lscm/common.hpp"

namespace lscm
{

// splitmix64 finalizer (Vigna); full-period mix of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class CounterRng
{
  public:
    explicit CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {})
        : key_(mix64(seed))
    {
        for (std::uint64_t w : stream)
            key_ = mix64(key_ ^ (mix64(w) + 0x9e3779b97f4a7c15ULL + (key_ << 6) + (key_ >> 2)));
    }

    std::uint64_t next_u64() { return mix64(key_ ^ (counter_++ * 0xd1b54a32d192ed03ULL)); }

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // standard normal via Box-Muller; consumes exactly two uniforms per call
    double normal()
    {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0)
            u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }

    // integer in [0, n)
    std::uint64_t below(std::uint64_t n)
    {
        // multiply-shift bounded draw; bias is negligible for n << 2^64
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace lscm

#endif
