#pragma once

// Fisher information of the mixture in q and the quantities tied to it.
//
//   I(q)        = E_Q[((f1 - f0) / f^(q))^2]      per-observation information
//   eta_Q(x)    = q f1(x) / f^(q)(x)                posterior of class 1
//   resolution  = var_Q[eta_Q(X)]
//   brier       = E_Q[(Y - eta_Q(X))^2] = q (1 - q) - resolution
//
// and I(q) = resolution / (q^2 (1 - q)^2), so the asymptotic variance of the
// ML estimator on n points is q^2 (1 - q)^2 / (n resolution) = 1 / (n I(q)).
//
// I(q) and the resolution are computed by separate quadratures of different
// integrands, so the identity above is a genuine check of both.

#include <cmath>
#include <cstddef>

#include "prevalence/densities.hpp"
#include "prevalence/errors.hpp"
#include "prevalence/quadrature.hpp"

namespace prevalence {

struct FisherInformation {
    double value = 0.0;
    bool degenerate = false;  ///< f1 == f0 on the whole support
    double error = 0.0;       ///< quadrature error estimate
};

struct EfficiencyReport {
    double q = 0.0;
    std::size_t n = 0;
    double fisher_info = 0.0;
    double cr_bound = 0.0;     ///< 1 / (n I(q))
    double asym_var_ml = 0.0;  ///< same value as cr_bound
    double resolution = 0.0;
    double brier = 0.0;
    double uncertainty = 0.0;  ///< q (1 - q)

    double sigma_ml() const { return std::sqrt(asym_var_ml); }
};

namespace detail {

// log(1 / (1 + exp(-a))) without overflow.
inline double log_sigmoid(double a) noexcept {
    return a >= 0.0 ? -std::log1p(std::exp(-a)) : a - std::log1p(std::exp(a));
}

template <DensityPair D>
QuadratureResult integrate_over_support(const D& pair, auto&& integrand, const QuadratureSettings& settings) {
    return integrate(integrand, pair.support(), settings);
}

}  // namespace detail

/// eta_Q(x) = q f1(x) / f^(q)(x), evaluated as a logistic of the log ratio.
template <DensityPair D>
double posterior(const MixtureModel<D>& model, double x) {
    detail::require_finite(x, "x");
    const double q = model.q();
    if (q == 0.0) return 0.0;
    if (q == 1.0) return 1.0;
    const double a = model.densities().log_ratio(x) + std::log(q) - std::log1p(-q);
    return 1.0 / (1.0 + std::exp(-a));
}

/// Integral of (f1 - f0)^2 / f^(q) over the support. Requires 0 < q < 1.
template <DensityPair D>
FisherInformation fisher_information(const MixtureModel<D>& model, const QuadratureSettings& settings = {}) {
    const double q = model.q();
    if (!(q > 0.0 && q < 1.0)) throw DomainError("Fisher information is defined for q in (0, 1) only");
    const D& pair = model.densities();
    // f0 (f1/f0 - 1)^2 / ((1 - q) + q f1/f0), in log space.
    auto integrand = [&](double x) {
        const double lr = pair.log_ratio(x);
        if (lr == 0.0) return 0.0;
        const double log_value = pair.log_f0(x) + 2.0 * detail::log_abs_expm1(lr) - detail::log_mix_factor(q, lr);
        return std::exp(log_value);
    };
    const QuadratureResult r = detail::integrate_over_support(pair, integrand, settings);
    return {r.value, r.value == 0.0, r.error};
}

/// Integral of eta_Q^2 f^(q). Independent of the Fisher integrand.
template <DensityPair D>
double posterior_second_moment(const MixtureModel<D>& model, const QuadratureSettings& settings = {}) {
    const double q = model.q();
    if (q == 0.0) return 0.0;
    if (q == 1.0) return 1.0;
    const D& pair = model.densities();
    const double logit = std::log(q) - std::log1p(-q);
    auto integrand = [&](double x) {
        const double lr = pair.log_ratio(x);
        const double log_density = pair.log_f0(x) + detail::log_mix_factor(q, lr);
        return std::exp(2.0 * detail::log_sigmoid(lr + logit) + log_density);
    };
    return detail::integrate_over_support(pair, integrand, settings).value;
}

/// Integral of eta_Q f^(q); equals q by the law of total expectation.
template <DensityPair D>
double posterior_mean(const MixtureModel<D>& model, const QuadratureSettings& settings = {}) {
    const double q = model.q();
    if (q == 0.0) return 0.0;
    if (q == 1.0) return 1.0;
    const D& pair = model.densities();
    const double logit = std::log(q) - std::log1p(-q);
    auto integrand = [&](double x) {
        const double lr = pair.log_ratio(x);
        return std::exp(detail::log_sigmoid(lr + logit) + pair.log_f0(x) + detail::log_mix_factor(q, lr));
    };
    return detail::integrate_over_support(pair, integrand, settings).value;
}

/// Total mass of f^(q); 1 for a correctly normalised pair.
template <DensityPair D>
double mixture_mass(const MixtureModel<D>& model, const QuadratureSettings& settings = {}) {
    const D& pair = model.densities();
    const double q = model.q();
    auto integrand = [&](double x) { return std::exp(pair.log_f0(x) + detail::log_mix_factor(q, pair.log_ratio(x))); };
    return detail::integrate_over_support(pair, integrand, settings).value;
}

/// var_Q[eta_Q(X)], as the second moment minus q^2.
template <DensityPair D>
double resolution(const MixtureModel<D>& model, const QuadratureSettings& settings = {}) {
    const double q = model.q();
    if (q == 0.0 || q == 1.0) return 0.0;
    const double var = posterior_second_moment(model, settings) - q * q;
    return var > 0.0 ? var : 0.0;
}

template <DensityPair D>
double brier_score(const MixtureModel<D>& model, const QuadratureSettings& settings = {}) {
    const double q = model.q();
    return q * (1.0 - q) - resolution(model, settings);
}

template <DensityPair D>
EfficiencyReport efficiency_report(const MixtureModel<D>& model, std::size_t n, const QuadratureSettings& settings = {}) {
    if (n == 0) throw DomainError("sample size must be at least 1");
    const FisherInformation info = fisher_information(model, settings);
    if (info.degenerate) throw DegeneracyError("f1 == f0: the sample carries no information about q");

    EfficiencyReport r;
    r.q = model.q();
    r.n = n;
    r.fisher_info = info.value;
    r.cr_bound = 1.0 / (static_cast<double>(n) * info.value);
    r.asym_var_ml = r.cr_bound;
    r.uncertainty = r.q * (1.0 - r.q);
    r.resolution = resolution(model, settings);
    r.brier = r.uncertainty - r.resolution;
    return r;
}

}  // namespace prevalence
