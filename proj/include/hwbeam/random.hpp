#pragma once

#include <cmath>
#include <cstdint>

namespace hwbeam {

/// Master seed plus a stream index. Equal (master, stream) pairs yield
/// bit-identical sample sequences, so per-realization streams can be derived
/// up front and consumed by workers in any order.
struct Seed {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
};

/// splitmix64 mixer. Used for stream derivation and generator seeding.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ generator, state filled from (master, stream) through two
/// splitmix64 passes. Counter-based stream splitting: no jump-ahead needed,
/// streams are independent of the order they are instantiated in.
class Rng {
  public:
    explicit Rng(Seed seed) {
        std::uint64_t x = seed.master;
        const std::uint64_t h = splitmix64(x);
        x = h ^ ((seed.stream + 1) * 0xd1b54a32d192ed03ULL);
        s_[0] = splitmix64(x);
        s_[1] = splitmix64(x);
        s_[2] = splitmix64(x);
        s_[3] = splitmix64(x);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // all-zero state is absorbing
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Exponential variate with the given rate; strictly positive.
    double exponential(double rate) {
        double u;
        do {
            u = next_double();
        } while (u <= 0.0);
        return -std::log(u) / rate;
    }

    bool bernoulli(double p) { return next_double() < p; }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::uint64_t s_[4];
};

}  // namespace hwbeam
