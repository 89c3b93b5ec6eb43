#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace mixwit {

/// Seedable random stream used throughout the library. Wraps mt19937_64 but
/// generates uniforms and gaussians from raw 64-bit words, so results are
/// identical across standard library implementations. Independent streams for
/// parallel draws are obtained with fork(), which mixes (seed, index) via
/// splitmix64.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t bits() { return gen_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // rejection-free modulo is fine here; n is tiny compared to 2^64
        return gen_() % n;
    }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    std::complex<double> gaussian_complex() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

    /// +1 with probability (1 + mean) / 2, else -1.
    int pm_one(double mean) { return uniform() < 0.5 * (1.0 + mean) ? 1 : -1; }

    /// Independent stream derived from (seed, index).
    Rng fork(std::uint64_t index) const { return Rng(mix(seed_, index)); }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
        // splitmix64 over seed ^ golden-ratio-multiplied index
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    std::mt19937_64 gen_;
    std::uint64_t seed_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace mixwit
