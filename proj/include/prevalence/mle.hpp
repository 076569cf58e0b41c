#pragma once

// Maximum-likelihood prevalence estimation under prior probability shift.
//
// With the class-conditional densities known, the log-likelihood
//   log L(q) = sum_i log(q (f1(z_i) - f0(z_i)) + f0(z_i))
// is strictly concave on [0, 1] as soon as one sample point has
// f1(z_j) != f0(z_j). The maximiser is then unique and is located by the
// two sample means of the likelihood ratio:
//
//   mean(f1/f0) <= 1                      -> q_hat = 0
//   mean(f0/f1) <= 1                      -> q_hat = 1
//   mean(f1/f0) > 1 and mean(f0/f1) > 1   -> q_hat is the unique root of the
//                                            score in (0, 1)
//
// The interior root is bracketed by bisection on the strictly decreasing
// score. em_estimate and grid_oracle are independent routes to the same
// maximiser and exist to cross-check it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "prevalence/densities.hpp"
#include "prevalence/errors.hpp"

namespace prevalence {

enum class EstimateCase { Interior, BoundaryZero, BoundaryOne };

constexpr std::string_view to_string(EstimateCase c) noexcept {
    switch (c) {
        case EstimateCase::Interior: return "interior";
        case EstimateCase::BoundaryZero: return "boundary_zero";
        case EstimateCase::BoundaryOne: return "boundary_one";
    }
    return "unknown";
}

struct PrevalenceEstimate {
    double q_hat = 0.0;
    EstimateCase estimate_case = EstimateCase::Interior;
    std::size_t iterations = 0;
    /// |score(q_hat)| for interior estimates, 0 on the boundary.
    double residual = 0.0;
};

struct RatioSummary {
    double mean_ratio_10 = 1.0;  ///< mean of f1(z_i) / f0(z_i)
    double mean_ratio_01 = 1.0;  ///< mean of f0(z_i) / f1(z_i)
    bool degenerate = false;     ///< f1(z_j) == f0(z_j) at every point
};

/// A point counts as uninformative when |log(f1/f0)| is below this.
inline constexpr double degeneracy_log_tolerance = 1e-12;

struct MleSettings {
    double tol = 1e-10;             ///< final bracket width
    double bracket_margin = 1e-12;  ///< initial bracket is (margin, 1 - margin)
};

struct EmSettings {
    double q0 = 0.5;
    double tol = 1e-10;  ///< stop once |q_{t+1} - q_t| < tol
    std::size_t max_iter = 100000;
};

struct GridResult {
    double q = 0.0;
    bool degenerate = false;  ///< likelihood constant in q; q is the first grid point
};

namespace detail {

// Per-point log likelihood ratios, computed once per sample.
template <DensityPair D>
std::vector<double> log_ratios(const D& pair, const Sample& sample) {
    std::vector<double> lr;
    lr.reserve(sample.size());
    for (double z : sample.values()) lr.push_back(pair.log_ratio(z));
    return lr;
}

inline bool is_degenerate(std::span<const double> lr) {
    return std::all_of(lr.begin(), lr.end(),
                       [](double v) { return std::abs(v) < degeneracy_log_tolerance; });
}

// d / (1 + q d) with d = f1/f0 - 1; tends to 1/q as d -> inf.
inline double score_term(double d, double q) noexcept {
    if (std::isinf(d)) return 1.0 / q;
    return d / (1.0 + q * d);
}

inline double score_from_excess(std::span<const double> excess, double q) noexcept {
    double s = 0.0;
    for (double d : excess) s += score_term(d, q);
    return s;
}

inline std::vector<double> ratio_excess(std::span<const double> lr) {
    std::vector<double> d;
    d.reserve(lr.size());
    for (double v : lr) d.push_back(std::expm1(v));
    return d;
}

inline RatioSummary summarize(std::span<const double> lr) {
    RatioSummary r;
    if (is_degenerate(lr)) {
        r.degenerate = true;
        return r;
    }
    double s10 = 0.0;
    double s01 = 0.0;
    for (double v : lr) {
        s10 += std::exp(v);
        s01 += std::exp(-v);
    }
    const double n = static_cast<double>(lr.size());
    r.mean_ratio_10 = s10 / n;
    r.mean_ratio_01 = s01 / n;
    return r;
}

inline void require_prevalence(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("q must lie in [0, 1]");
}

}  // namespace detail

template <DensityPair D>
double log_likelihood(const D& pair, const Sample& sample, double q) {
    detail::require_prevalence(q);
    double ll = 0.0;
    for (double z : sample.values()) ll += pair.log_f0(z) + detail::log_mix_factor(q, pair.log_ratio(z));
    return ll;
}

/// First derivative of the log-likelihood in q, for q strictly inside (0, 1).
template <DensityPair D>
double score(const D& pair, const Sample& sample, double q) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("score is evaluated for q in (0, 1) only");
    const auto lr = detail::log_ratios(pair, sample);
    if (detail::is_degenerate(lr)) throw DegeneracyError("f1 == f0 at every sample point; the score vanishes");
    return detail::score_from_excess(detail::ratio_excess(lr), q);
}

template <DensityPair D>
RatioSummary classify_case(const D& pair, const Sample& sample) {
    return detail::summarize(detail::log_ratios(pair, sample));
}

namespace detail {

inline PrevalenceEstimate mle_from_log_ratios(std::span<const double> lr, const MleSettings& settings) {
    if (!(settings.tol > 0.0)) throw DomainError("tolerance must be positive");
    const RatioSummary summary = summarize(lr);
    if (summary.degenerate)
        throw DegeneracyError("f1 == f0 at every sample point; the likelihood is constant in q");

    // Closed inequalities on the boundary side.
    if (summary.mean_ratio_10 <= 1.0) return {0.0, EstimateCase::BoundaryZero, 0, 0.0};
    if (summary.mean_ratio_01 <= 1.0) return {1.0, EstimateCase::BoundaryOne, 0, 0.0};

    const auto excess = ratio_excess(lr);
    double lo = settings.bracket_margin;
    double hi = 1.0 - settings.bracket_margin;
    std::size_t iterations = 0;
    while (hi - lo > settings.tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (score_from_excess(excess, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        ++iterations;
    }
    const double q_hat = 0.5 * (lo + hi);
    return {q_hat, EstimateCase::Interior, iterations, std::abs(score_from_excess(excess, q_hat))};
}

}  // namespace detail

template <DensityPair D>
PrevalenceEstimate mle_estimate(const D& pair, const Sample& sample, const MleSettings& settings = {}) {
    return detail::mle_from_log_ratios(detail::log_ratios(pair, sample), settings);
}

/// EM fixed-point iteration q <- (1/n) sum_i eta_q(z_i). Converges to the MLE
/// (linearly, and slowly when q_hat sits near a boundary). The result is
/// snapped to 0 or 1 when the final iterate lies within sqrt(tol) of it.
template <DensityPair D>
PrevalenceEstimate em_estimate(const D& pair, const Sample& sample, const EmSettings& settings = {}) {
    if (!(settings.q0 > 0.0 && settings.q0 < 1.0)) throw DomainError("EM start q0 must lie in (0, 1)");
    if (!(settings.tol > 0.0)) throw DomainError("tolerance must be positive");
    const auto lr = detail::log_ratios(pair, sample);
    if (detail::is_degenerate(lr))
        throw DegeneracyError("f1 == f0 at every sample point; the likelihood is constant in q");

    const double n = static_cast<double>(lr.size());
    double q = settings.q0;
    for (std::size_t it = 1; it <= settings.max_iter; ++it) {
        // Posterior eta = 1 / (1 + exp(-(lr + logit q))).
        const double logit = std::log(q) - std::log1p(-q);
        double s = 0.0;
        for (double v : lr) s += 1.0 / (1.0 + std::exp(-(v + logit)));
        const double next = s / n;
        const double step = std::abs(next - q);
        q = next;
        if (step < settings.tol) {
            const double snap = std::sqrt(settings.tol);
            if (q <= snap) return {0.0, EstimateCase::BoundaryZero, it, 0.0};
            if (q >= 1.0 - snap) return {1.0, EstimateCase::BoundaryOne, it, 0.0};
            return {q, EstimateCase::Interior, it, std::abs(detail::score_from_excess(detail::ratio_excess(lr), q))};
        }
        if (q <= 0.0 || q >= 1.0) {
            // The posterior mean underflowed onto the boundary.
            const bool zero = q <= 0.0;
            return {zero ? 0.0 : 1.0, zero ? EstimateCase::BoundaryZero : EstimateCase::BoundaryOne, it, 0.0};
        }
    }
    throw ConvergenceError("EM did not converge within max_iter iterations", q, settings.max_iter);
}

/// Brute-force maximiser of the log-likelihood over {0, step, 2 step, ..., 1}.
/// Ties go to the smallest q.
template <DensityPair D>
GridResult grid_oracle(const D& pair, const Sample& sample, double grid_step = 1e-3) {
    if (!(grid_step > 0.0 && grid_step <= 0.01)) throw DomainError("grid step must lie in (0, 0.01]");
    const auto lr = detail::log_ratios(pair, sample);
    GridResult result;
    result.degenerate = detail::is_degenerate(lr);

    const auto points = static_cast<std::size_t>(std::floor(1.0 / grid_step + 1e-9));
    double best = -std::numeric_limits<double>::infinity();
    // log f0 terms are constant in q and dropped.
    for (std::size_t k = 0; k <= points + 1; ++k) {
        const double q = std::min(1.0, static_cast<double>(k) * grid_step);
        double ll = 0.0;
        for (double v : lr) ll += detail::log_mix_factor(q, v);
        if (ll > best) {
            best = ll;
            result.q = q;
        }
        if (q == 1.0) break;
    }
    return result;
}

}  // namespace prevalence
