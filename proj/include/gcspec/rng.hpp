#ifndef GCSPEC_RNG_HPP
#define GCSPEC_RNG_HPP

#include <cmath>
#include <cstdint>

namespace gcspec {

// Bit-reproducible RNG stack. Every sampling routine below is fully
// specified here (no std:: distributions), so identical seeds give
// identical streams on any platform and under any thread schedule.

inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Per-work-unit substream: O(1) derivation from (seed, index), used to
// make bootstrap replicates and Monte Carlo trials schedule-invariant.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t s = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    return splitmix64(s);
}

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed)
    {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    // xoshiro256**
    result_type operator()()
    {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on [0, 1)
    double uniform()
    {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    // uniform integer on {0, ..., n-1}; bias is O(n / 2^64)
    std::uint64_t uniform_below(std::uint64_t n)
    {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>((*this)()) * n) >> 64);
    }

    // standard normal via Box-Muller (second draw discarded)
    double normal()
    {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // geometric block length on {1, 2, ...} with mean L = 1/p
    std::uint64_t geometric_length(double p)
    {
        if (p >= 1.0) return 1;
        const double u = 1.0 - uniform(); // (0, 1]
        return 1 + static_cast<std::uint64_t>(std::log(u) / std::log1p(-p));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k)
    {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

} // namespace gcspec

#endif
