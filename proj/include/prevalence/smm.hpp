#pragma once

// Sample Mean Matching on the binormal model, and the binormal AUC.
//
// SMM solves mean(z) = (1 - q) mu0 + q mu1 for q. It is unbiased, and with
// known class-conditional distributions its variance is exact:
//   var = (sigma^2 + q (1 - q) (mu1 - mu0)^2) / (n (mu1 - mu0)^2)
// which for mu0 = 0, sigma = 1 reduces to (1/n) (1/mu1^2 + q (1 - q)).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "prevalence/densities.hpp"
#include "prevalence/errors.hpp"

namespace prevalence {

struct SmmReport {
    double q_hat = 0.0;          ///< raw estimate; may fall outside [0, 1]
    double q_hat_clipped = 0.0;  ///< q_hat clamped to [0, 1]
    double exact_var = 0.0;      ///< at the plug-in q_hat_clipped
    double exact_sd = 0.0;
};

/// Standard normal distribution function, Phi(x) = erfc(-x / sqrt 2) / 2.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Inverse of normal_cdf on (0, 1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal quantile requires p in (0, 1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

inline double smm_estimate(const BinormalModel& model, const Sample& sample) {
    return (sample.mean() - model.mu0()) / (model.mu1() - model.mu0());
}

inline double smm_variance(const BinormalModel& model, double q, std::size_t n) {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("q must lie in [0, 1]");
    if (n == 0) throw DomainError("sample size must be at least 1");
    const double gap = model.mu1() - model.mu0();
    const double s2 = model.sigma() * model.sigma();
    return (s2 + q * (1.0 - q) * gap * gap) / (static_cast<double>(n) * gap * gap);
}

inline SmmReport smm_report(const BinormalModel& model, const Sample& sample) {
    SmmReport r;
    r.q_hat = smm_estimate(model, sample);
    r.q_hat_clipped = std::clamp(r.q_hat, 0.0, 1.0);
    r.exact_var = smm_variance(model, r.q_hat_clipped, sample.size());
    r.exact_sd = std::sqrt(r.exact_var);
    return r;
}

/// AUC of the likelihood-ratio score: Phi((mu1 - mu0) / (sigma sqrt 2)).
inline double auc(const BinormalModel& model) {
    return normal_cdf((model.mu1() - model.mu0()) / (model.sigma() * std::numbers::sqrt2));
}

/// Separation mu1 - mu0 (in units of sigma) whose AUC equals `value`.
inline double separation_for_auc(double value) {
    if (!(value > 0.5 && value < 1.0)) throw DomainError("AUC must lie in (0.5, 1)");
    return std::numbers::sqrt2 * normal_quantile(value);
}

}  // namespace prevalence
