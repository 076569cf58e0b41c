#pragma once

// Globally adaptive Gauss-Kronrod (7, 15) quadrature.
//
// The panel with the largest error estimate is bisected until the summed
// error drops below max(abs_tol, rel_tol * |result|). Per-panel error uses
// the QUADPACK heuristic, which is conservative for smooth integrands.
//
// Infinite ends are removed by substitution, with c = center, s = scale:
//   (-inf, inf):  x = c + s t / (1 - t^2),   t in (-1, 1)
//   [a, inf)   :  x = a + s t / (1 - t),     t in [0, 1)
//   (-inf, b]  :  x = b - s t / (1 - t),     t in [0, 1)
// Kronrod nodes are interior, so the singular endpoints are never evaluated.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "prevalence/densities.hpp"
#include "prevalence/errors.hpp"

namespace prevalence {

struct QuadratureSettings {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    std::size_t max_subdivisions = 200;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw DomainError("quadrature tolerances must be positive");
        if (max_subdivisions == 0) throw DomainError("max_subdivisions must be at least 1");
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t panels = 0;
};

namespace detail {

struct Panel {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Panel& other) const noexcept { return error < other.error; }
};

// Integrand magnitudes below this count as zero.
inline constexpr double negligible = 1e-300;

template <class G>
Panel gauss_kronrod_15(const G& g, double a, double b) {
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
    using gauss = boost::math::quadrature::gauss<double, 7>;
    const auto& xk = kronrod::abscissa();
    const auto& wk = kronrod::weights();
    const auto& wg = gauss::weights();

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::array<double, 15> fv{};
    fv[0] = g(center);
    for (std::size_t i = 1; i < 8; ++i) {
        const double dx = half * xk[i];
        fv[2 * i - 1] = g(center - dx);
        fv[2 * i] = g(center + dx);
    }
    for (double& v : fv) {
        if (!std::isfinite(v)) throw DomainError("integrand is not finite on the integration domain");
        if (std::abs(v) < negligible) v = 0.0;
    }

    // Gauss-7 nodes are the even-index Kronrod nodes.
    double kronrod_sum = wk[0] * fv[0];
    double gauss_sum = wg[0] * fv[0];
    double abs_sum = wk[0] * std::abs(fv[0]);
    for (std::size_t i = 1; i < 8; ++i) {
        const double pair = fv[2 * i - 1] + fv[2 * i];
        kronrod_sum += wk[i] * pair;
        abs_sum += wk[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
        if (i % 2 == 0) gauss_sum += wg[i / 2] * pair;
    }
    const double mean = 0.5 * kronrod_sum;
    double asc = wk[0] * std::abs(fv[0] - mean);
    for (std::size_t i = 1; i < 8; ++i)
        asc += wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));

    const double scale = std::abs(half);
    const double value = kronrod_sum * half;
    double error = std::abs((kronrod_sum - gauss_sum) * half);
    const double resasc = asc * scale;
    const double resabs = abs_sum * scale;
    if (resasc != 0.0 && error != 0.0)
        error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        error = std::max(50.0 * eps * resabs, error);
    return {a, b, value, error};
}

template <class G>
QuadratureResult adaptive(const G& g, double a, double b, const QuadratureSettings& settings) {
    // Start from a few equal panels so narrow features away from the midpoint are seen.
    constexpr int initial_panels = 4;
    std::priority_queue<Panel> queue;
    double total = 0.0;
    double total_error = 0.0;
    const double width = (b - a) / initial_panels;
    for (int i = 0; i < initial_panels; ++i) {
        const double lo = a + width * i;
        const double hi = (i + 1 == initial_panels) ? b : a + width * (i + 1);
        Panel p = gauss_kronrod_15(g, lo, hi);
        total += p.value;
        total_error += p.error;
        queue.push(p);
    }

    std::size_t panels = initial_panels;
    while (total_error > std::max(settings.abs_tol, settings.rel_tol * std::abs(total))) {
        if (panels >= settings.max_subdivisions)
            throw QuadratureError("adaptive quadrature did not converge within the subdivision limit",
                                  total, total_error);
        Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw QuadratureError("adaptive quadrature reached the resolution of double precision",
                                  total, total_error);
        Panel left = gauss_kronrod_15(g, worst.a, mid);
        Panel right = gauss_kronrod_15(g, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++panels;
    }

    // Re-sum from the panels to drop the drift of the running updates.
    double value = 0.0;
    double error = 0.0;
    for (; !queue.empty(); queue.pop()) {
        value += queue.top().value;
        error += queue.top().error;
    }
    return {value, error, panels};
}

}  // namespace detail

/// Integrates f over `domain` (either end may be infinite).
template <class F>
QuadratureResult integrate(F&& f, const Support& domain, const QuadratureSettings& settings = {}) {
    settings.validate();
    const double lo = domain.lo;
    const double hi = domain.hi;
    if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) throw DomainError("integration domain must satisfy lo < hi");
    const double s = domain.scale;
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("support scale must be positive and finite");

    const bool lo_inf = std::isinf(lo);
    const bool hi_inf = std::isinf(hi);

    if (!lo_inf && !hi_inf) return detail::adaptive(f, lo, hi, settings);

    if (lo_inf && hi_inf) {
        const double c = domain.center;
        auto g = [&](double t) {
            const double d = 1.0 - t * t;
            const double x = c + s * t / d;
            return f(x) * s * (1.0 + t * t) / (d * d);
        };
        return detail::adaptive(g, -1.0, 1.0, settings);
    }

    if (hi_inf) {
        auto g = [&](double t) {
            const double d = 1.0 - t;
            return f(lo + s * t / d) * s / (d * d);
        };
        return detail::adaptive(g, 0.0, 1.0, settings);
    }

    auto g = [&](double t) {
        const double d = 1.0 - t;
        return f(hi - s * t / d) * s / (d * d);
    };
    return detail::adaptive(g, 0.0, 1.0, settings);
}

/// Integrates over the whole real line with the given bulk location.
template <class F>
QuadratureResult integrate_real_line(F&& f, double center, double scale, const QuadratureSettings& settings = {}) {
    Support s;
    s.center = center;
    s.scale = scale;
    return integrate(std::forward<F>(f), s, settings);
}

}  // namespace prevalence
