#pragma once

// Class-conditional densities, the two-class mixture, and test samples.
//
// A density pair is anything that can evaluate log f0, log f1 and the log
// likelihood ratio log(f1/f0) on the real line. The solvers in mle.hpp and
// the integrals in efficiency.hpp only ever touch the pair through these
// three functions, so every downstream computation stays in log space.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prevalence/errors.hpp"
#include "prevalence/random.hpp"

namespace prevalence {

/// Integration domain hint. Infinite ends are allowed; `center` and `scale`
/// place the bulk of the mass for the infinite-interval substitution.
struct Support {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double center = 0.0;
    double scale = 1.0;

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

template <class D>
concept DensityPair = requires(const D& d, double x) {
    { d.log_f0(x) } -> std::convertible_to<double>;
    { d.log_f1(x) } -> std::convertible_to<double>;
    { d.log_ratio(x) } -> std::convertible_to<double>;
    { d.support() } -> std::convertible_to<Support>;
};

/// A pair that can also draw from each class-conditional distribution.
template <class D>
concept SamplingDensityPair = DensityPair<D> && requires(const D& d, int cls, Rng& rng) {
    { d.draw(cls, rng) } -> std::convertible_to<double>;
};

namespace detail {

inline constexpr double log_sqrt_2pi = 0.91893853320467274178;

inline double normal_log_pdf(double x, double mean, double sd) noexcept {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - log_sqrt_2pi;
}

/// log((1 - q) + q * exp(lr)), i.e. log(f^(q)(x) / f0(x)).
inline double log_mix_factor(double q, double lr) noexcept {
    if (q == 0.0) return 0.0;
    if (q == 1.0) return lr;
    if (lr <= 0.0) return std::log1p(q * std::expm1(lr));
    return lr + std::log(q + (1.0 - q) * std::exp(-lr));
}

/// log|exp(lr) - 1|; -inf at lr == 0.
inline double log_abs_expm1(double lr) noexcept {
    if (lr > 0.0) return lr + std::log(-std::expm1(-lr));
    return std::log(-std::expm1(lr));
}

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace detail

/// Equal-variance binormal pair: X | Y=i ~ N(mu_i, sigma^2) with mu0 < mu1.
class BinormalModel {
public:
    BinormalModel(double mu0, double mu1, double sigma) : mu0_(mu0), mu1_(mu1), sigma_(sigma) {
        if (!std::isfinite(mu0) || !std::isfinite(mu1) || !std::isfinite(sigma))
            throw DomainError("binormal parameters must be finite");
        if (!(mu1 > mu0)) throw DomainError("binormal model requires mu1 > mu0");
        if (!(sigma > 0.0)) throw DomainError("binormal model requires sigma > 0");
    }

    double mu0() const noexcept { return mu0_; }
    double mu1() const noexcept { return mu1_; }
    double sigma() const noexcept { return sigma_; }

    double log_f0(double x) const noexcept { return detail::normal_log_pdf(x, mu0_, sigma_); }
    double log_f1(double x) const noexcept { return detail::normal_log_pdf(x, mu1_, sigma_); }

    // ((mu1 - mu0) x + (mu0^2 - mu1^2) / 2) / sigma^2, factored to avoid cancellation.
    double log_ratio(double x) const noexcept {
        return (mu1_ - mu0_) * (x - 0.5 * (mu0_ + mu1_)) / (sigma_ * sigma_);
    }

    Support support() const noexcept {
        Support s;
        s.center = 0.5 * (mu0_ + mu1_);
        s.scale = sigma_;
        return s;
    }

    double draw(int cls, Rng& rng) const { return rng.normal(cls == 1 ? mu1_ : mu0_, sigma_); }

private:
    double mu0_;
    double mu1_;
    double sigma_;
};

/// Type-erased pair built from log-density callables. Sampling is available
/// only when both samplers are supplied.
class FunctionDensityPair {
public:
    using LogDensity = std::function<double(double)>;
    using Sampler = std::function<double(Rng&)>;

    FunctionDensityPair(LogDensity log_f0, LogDensity log_f1, Support support = {},
                        Sampler sample0 = {}, Sampler sample1 = {})
        : log_f0_(std::move(log_f0)),
          log_f1_(std::move(log_f1)),
          support_(support),
          sample0_(std::move(sample0)),
          sample1_(std::move(sample1)) {
        if (!log_f0_ || !log_f1_) throw DomainError("both log-densities are required");
    }

    double log_f0(double x) const { return log_f0_(x); }
    double log_f1(double x) const { return log_f1_(x); }
    double log_ratio(double x) const { return log_f1_(x) - log_f0_(x); }
    Support support() const noexcept { return support_; }

    bool can_sample() const noexcept { return sample0_ && sample1_; }

    double draw(int cls, Rng& rng) const {
        if (!can_sample()) throw CapabilityError("density pair does not support sampling");
        return cls == 1 ? sample1_(rng) : sample0_(rng);
    }

private:
    LogDensity log_f0_;
    LogDensity log_f1_;
    Support support_;
    Sampler sample0_;
    Sampler sample1_;
};

/// Test-set feature distribution: (1 - q) f0 + q f1.
template <DensityPair D>
class MixtureModel {
public:
    MixtureModel(D densities, double q) : densities_(std::move(densities)), q_(q) {
        if (!(q >= 0.0 && q <= 1.0)) throw DomainError("prevalence q must lie in [0, 1]");
    }

    const D& densities() const noexcept { return densities_; }
    double q() const noexcept { return q_; }

    double log_density(double x) const {
        return densities_.log_f0(x) + detail::log_mix_factor(q_, densities_.log_ratio(x));
    }

private:
    D densities_;
    double q_;
};

/// Test sample z_1..z_n; non-empty and finite.
class Sample {
public:
    explicit Sample(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw DomainError("sample must contain at least one value");
        for (double v : values_) detail::require_finite(v, "sample value");
    }

    Sample(std::initializer_list<double> values) : Sample(std::vector<double>(values)) {}

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double mean() const noexcept {
        double s = 0.0;
        for (double v : values_) s += v;
        return s / static_cast<double>(values_.size());
    }

private:
    std::vector<double> values_;
};

template <DensityPair D>
double mixture_density(const MixtureModel<D>& model, double x) {
    detail::require_finite(x, "x");
    return std::exp(model.log_density(x));
}

/// f1(x) / f0(x), evaluated as exp(log ratio).
template <DensityPair D>
double likelihood_ratio(const D& pair, double x) {
    detail::require_finite(x, "x");
    return std::exp(pair.log_ratio(x));
}

/// Appends n i.i.d. mixture draws to `out` using the caller's stream.
template <DensityPair D>
void draw_mixture(const MixtureModel<D>& model, std::size_t n, Rng& rng, std::vector<double>& out) {
    if constexpr (!SamplingDensityPair<D>) {
        throw CapabilityError("density family does not support sampling");
    } else {
        out.reserve(out.size() + n);
        for (std::size_t i = 0; i < n; ++i) {
            const int cls = rng.bernoulli(model.q()) ? 1 : 0;
            out.push_back(model.densities().draw(cls, rng));
        }
    }
}

template <DensityPair D>
Sample sample_mixture(const MixtureModel<D>& model, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw DomainError("sample size must be at least 1");
    Rng rng(seed);
    std::vector<double> values;
    draw_mixture(model, n, rng, values);
    return Sample(std::move(values));
}

}  // namespace prevalence
