#pragma once

#include <cmath>
#include <cstdint>

namespace vmfgs {

/// Seedable, splittable random stream (xoshiro256++ core, splitmix64 state
/// expansion). Every stochastic operation in the library takes an explicit
/// seed or an Rng; there is no global generator. Two streams built from the
/// same seed produce identical output on every platform: uniform and normal
/// deviates are generated with fixed arithmetic, never with the
/// implementation-defined std:: distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    /// Independent child stream. derive(tag) is a pure function of
    /// (this stream's seed, tag); children with distinct tags do not overlap
    /// in any practical sense.
    Rng derive(std::uint64_t tag) const {
        std::uint64_t x = seed_ ^ (0x9e3779b97f4a7c15ULL * (tag + 1));
        return Rng(splitmix64(x));
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t nextUint64() {
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

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() {
        return static_cast<double>(nextUint64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the second deviate of each pair is
    /// cached, so consumption alternates two uniforms / zero uniforms.
    double normal() {
        if (hasSpare_) {
            hasSpare_ = false;
            return spare_;
        }
        double u1 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        hasSpare_ = true;
        return r * std::cos(theta);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4];
    std::uint64_t seed_;
    double spare_ = 0.0;
    bool hasSpare_ = false;
};

}  // namespace vmfgs
