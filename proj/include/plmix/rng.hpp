#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace plmix {

/// splitmix64 finalizer; used both as a mixer and for deriving
/// sub-stream seeds that are stable under reordering of the run plan.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) { return mix64(mix64(a) ^ b); }

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(mix64(a, b) ^ c);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                           std::uint64_t d) {
    return mix64(mix64(a, b, c) ^ d);
}

/// Deterministic random stream. The standard pins mt19937_64's output,
/// and the uniform/normal transforms below are explicit, so sequences are
/// reproducible across implementations (std::*_distribution is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (cosine branch; two uniforms per draw).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647693 * u2);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    /// Index in [0, n) by CDF inversion over the given non-negative weights.
    std::size_t categorical(const double* weights, std::size_t n) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += weights[i];
        double u = uniform() * total;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            u -= weights[i];
            if (u < 0.0) return i;
        }
        return n - 1;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace plmix
