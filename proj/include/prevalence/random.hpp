#pragma once

// Reproducible random streams.
//
// Engine: std::mt19937_64. Its output sequence is fixed by the C++ standard,
// so a seed yields the same stream on every conforming toolchain. The
// distribution layer is written here rather than taken from <random>
// because std::uniform_real_distribution and std::normal_distribution are
// implementation-defined.
//
//   uniform  : top 53 bits of one engine word, scaled to [0, 1)
//   normal   : Marsaglia polar method, second variate cached
//   streams  : derive_seed(master, r) = splitmix64(master + 0x9e3779b97f4a7c15 * (r + 1))

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

namespace prevalence {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the independent stream with index `stream` under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return splitmix64(master + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    double standard_normal() {
        if (spare_) {
            double z = *spare_;
            spare_.reset();
            return z;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        return u * m;
    }

    double normal(double mean, double sd) { return mean + sd * standard_normal(); }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

}  // namespace prevalence
