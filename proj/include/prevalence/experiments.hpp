#pragma once

// Binormal benchmark: SMM versus ML standard deviations across model power,
// the sigma_SMM / sigma_ML surface over (AUC, q), and seeded Monte Carlo
// studies of both estimators.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "prevalence/densities.hpp"
#include "prevalence/efficiency.hpp"
#include "prevalence/errors.hpp"
#include "prevalence/mle.hpp"
#include "prevalence/quadrature.hpp"
#include "prevalence/random.hpp"
#include "prevalence/smm.hpp"

namespace prevalence {

struct Table1Row {
    double mu1 = 0.0;
    double auc = 0.0;
    double sigma_smm = 0.0;
    double sigma_ml = 0.0;
};

struct RatioGridPoint {
    double auc = 0.0;
    double q = 0.0;
    double ratio = 0.0;  ///< sigma_SMM / sigma_ML
};

struct MonteCarloSummary {
    std::size_t replications = 0;  ///< replications that produced an estimate
    std::size_t n = 0;
    double true_q = 0.0;
    double mean_q_hat = 0.0;
    double sd_q_hat = 0.0;
    double predicted_sd = 0.0;
    std::size_t boundary_hits = 0;
    std::size_t degenerate_skips = 0;
};

struct SmmMonteCarloSummary {
    std::size_t replications = 0;
    std::size_t n = 0;
    double true_q = 0.0;
    double mean_q_hat = 0.0;
    double var_q_hat = 0.0;
    double exact_var = 0.0;
};

struct Table1Settings {
    std::size_t n = 100;
    double q = 0.2;
    double mu0 = 0.0;
    double sigma = 1.0;
};

inline constexpr std::array<double, 13> table1_mu1_grid = {0.01, 0.05, 0.10, 0.25, 0.50, 1.00, 1.50,
                                                          2.00, 2.50, 3.00, 3.50, 4.00, 5.00};

inline Table1Row table1_row(double mu1, const Table1Settings& cfg = {}, const QuadratureSettings& quad = {}) {
    const BinormalModel model(cfg.mu0, mu1, cfg.sigma);
    const EfficiencyReport report = efficiency_report(MixtureModel(model, cfg.q), cfg.n, quad);
    return {mu1, auc(model), std::sqrt(smm_variance(model, cfg.q, cfg.n)), report.sigma_ml()};
}

inline std::vector<Table1Row> reproduce_table1(const QuadratureSettings& quad = {}) {
    std::vector<Table1Row> rows;
    rows.reserve(table1_mu1_grid.size());
    for (double mu1 : table1_mu1_grid) rows.push_back(table1_row(mu1, {}, quad));
    return rows;
}

// ---------------------------------------------------------------------------
// Golden file: header `mu1,auc,sigma_smm,sigma_ml`, one row per mu1.

inline std::vector<Table1Row> parse_table1_csv(std::istream& in) {
    std::vector<Table1Row> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != "mu1,auc,sigma_smm,sigma_ml")
                throw ParseError("unexpected golden header: " + line, line_no);
            header_seen = true;
            continue;
        }
        std::array<double, 4> cells{};
        std::stringstream ss(line);
        std::string cell;
        std::size_t k = 0;
        while (std::getline(ss, cell, ',')) {
            if (k >= cells.size()) throw ParseError("too many columns", line_no);
            try {
                std::size_t used = 0;
                cells[k] = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ParseError("not a number: '" + cell + "'", line_no);
            }
            ++k;
        }
        if (k != cells.size()) throw ParseError("expected 4 columns", line_no);
        rows.push_back({cells[0], cells[1], cells[2], cells[3]});
    }
    if (!header_seen) throw ParseError("golden file has no header", line_no);
    return rows;
}

inline std::vector<Table1Row> load_table1_golden(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open golden file: " + path);
    return parse_table1_csv(in);
}

struct CellMismatch {
    double mu1 = 0.0;
    std::string column;
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;
};

struct Table1Tolerances {
    double auc = 5e-5;
    double sigma_smm = 5e-5;
    double sigma_ml = 1e-4;
};

// Guard against representation error in the printed decimals themselves.
inline constexpr double golden_slack = 1e-12;

inline std::vector<CellMismatch> compare_table1(const std::vector<Table1Row>& actual,
                                                const std::vector<Table1Row>& golden,
                                                const Table1Tolerances& tol = {}) {
    std::vector<CellMismatch> out;
    for (const Table1Row& g : golden) {
        auto it = std::find_if(actual.begin(), actual.end(),
                               [&](const Table1Row& a) { return std::abs(a.mu1 - g.mu1) < 1e-9; });
        if (it == actual.end()) {
            out.push_back({g.mu1, "row", g.mu1, std::nan(""), 0.0});
            continue;
        }
        auto check = [&](const char* column, double expected, double value, double t) {
            if (!(std::abs(value - expected) <= t + golden_slack)) out.push_back({g.mu1, column, expected, value, t});
        };
        check("auc", g.auc, it->auc, tol.auc);
        check("sigma_smm", g.sigma_smm, it->sigma_smm, tol.sigma_smm);
        check("sigma_ml", g.sigma_ml, it->sigma_ml, tol.sigma_ml);
    }
    if (actual.size() != golden.size()) out.push_back({0.0, "row_count", double(golden.size()), double(actual.size()), 0.0});
    return out;
}

// ---------------------------------------------------------------------------
// Ratio surface over (AUC, q) with mu0 = 0, sigma = 1.

inline std::vector<double> default_auc_grid() {
    std::vector<double> g;
    for (int k = 11; k <= 19; ++k) g.push_back(k * 0.05);
    g.push_back(0.99);
    return g;
}

inline std::vector<double> default_q_grid() {
    std::vector<double> g;
    for (int k = 1; k <= 19; ++k) g.push_back(k * 0.05);
    return g;
}

inline RatioGridPoint ratio_point(double auc_value, double q, std::size_t n, const QuadratureSettings& quad = {}) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0, 1)");
    if (n == 0) throw DomainError("sample size must be at least 1");
    const BinormalModel model(0.0, separation_for_auc(auc_value), 1.0);
    const double info = fisher_information(MixtureModel(model, q), quad).value;

    auto ratio_at = [&](std::size_t size) {
        const double sd_smm = std::sqrt(smm_variance(model, q, size));
        const double sd_ml = std::sqrt(1.0 / (static_cast<double>(size) * info));
        return sd_smm / sd_ml;
    };
    const double ratio = ratio_at(n);
    const double check = ratio_at(4 * n);
    if (!(std::abs(ratio - check) <= 1e-9 * ratio))
        throw Error("sample size failed to cancel in the SMM/ML standard deviation ratio");
    return {auc_value, q, ratio};
}

inline std::vector<RatioGridPoint> ratio_surface(const std::vector<double>& auc_grid, const std::vector<double>& q_grid,
                                                 std::size_t n = 100, const QuadratureSettings& quad = {}) {
    if (auc_grid.empty() || q_grid.empty()) throw DomainError("ratio surface grids must be non-empty");
    std::vector<RatioGridPoint> out;
    out.reserve(auc_grid.size() * q_grid.size());
    for (double a : auc_grid)
        for (double q : q_grid) out.push_back(ratio_point(a, q, n, quad));
    return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo. Replication r draws from Rng(derive_seed(seed, r)); results
// are stored by index and reduced in index order, so the thread count never
// changes the output.

namespace detail {

template <class Body>
void for_each_replication(std::size_t replications, unsigned threads, Body&& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, replications));
    if (threads <= 1) {
        for (std::size_t r = 0; r < replications; ++r) body(r);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t r = t; r < replications; r += threads) body(r);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;  ///< unbiased (n - 1) sample variance
};

inline Moments moments(const std::vector<double>& xs) {
    Moments m;
    if (xs.empty()) return m;
    double sum = 0.0;
    for (double x : xs) sum += x;
    m.mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return m;
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.var = ss / static_cast<double>(xs.size() - 1);
    return m;
}

}  // namespace detail

struct MonteCarloSettings {
    std::size_t n = 100;
    std::size_t replications = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 0;  ///< 0: hardware concurrency
};

inline MonteCarloSummary monte_carlo_ml(const BinormalModel& model, double q, const MonteCarloSettings& mc,
                                        const QuadratureSettings& quad = {}) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("true q must lie in (0, 1)");
    if (mc.replications < 100) throw DomainError("at least 100 replications are required");
    if (mc.n == 0) throw DomainError("sample size must be at least 1");

    const MixtureModel mixture(model, q);
    enum class Outcome : unsigned char { Interior, Boundary, Degenerate };
    std::vector<double> estimates(mc.replications, 0.0);
    std::vector<Outcome> outcomes(mc.replications, Outcome::Interior);

    detail::for_each_replication(mc.replications, mc.threads, [&](std::size_t r) {
        Rng rng(derive_seed(mc.seed, r));
        std::vector<double> lr;
        lr.reserve(mc.n);
        for (std::size_t i = 0; i < mc.n; ++i) {
            const int cls = rng.bernoulli(q) ? 1 : 0;
            lr.push_back(model.log_ratio(model.draw(cls, rng)));
        }
        try {
            const PrevalenceEstimate est = detail::mle_from_log_ratios(lr, {});
            estimates[r] = est.q_hat;
            outcomes[r] = est.estimate_case == EstimateCase::Interior ? Outcome::Interior : Outcome::Boundary;
        } catch (const DegeneracyError&) {
            outcomes[r] = Outcome::Degenerate;
        }
    });

    MonteCarloSummary s;
    s.n = mc.n;
    s.true_q = q;
    std::vector<double> kept;
    kept.reserve(mc.replications);
    for (std::size_t r = 0; r < mc.replications; ++r) {
        if (outcomes[r] == Outcome::Degenerate) {
            ++s.degenerate_skips;
            continue;
        }
        if (outcomes[r] == Outcome::Boundary) ++s.boundary_hits;
        kept.push_back(estimates[r]);
    }
    s.replications = kept.size();
    const detail::Moments m = detail::moments(kept);
    s.mean_q_hat = m.mean;
    s.sd_q_hat = std::sqrt(m.var);
    s.predicted_sd = efficiency_report(mixture, mc.n, quad).sigma_ml();
    return s;
}

inline SmmMonteCarloSummary monte_carlo_smm(const BinormalModel& model, double q, const MonteCarloSettings& mc) {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("true q must lie in [0, 1]");
    if (mc.replications < 2) throw DomainError("at least 2 replications are required");
    if (mc.n == 0) throw DomainError("sample size must be at least 1");

    const MixtureModel mixture(model, q);
    std::vector<double> estimates(mc.replications, 0.0);
    detail::for_each_replication(mc.replications, mc.threads, [&](std::size_t r) {
        Rng rng(derive_seed(mc.seed, r));
        std::vector<double> values;
        draw_mixture(mixture, mc.n, rng, values);
        estimates[r] = smm_estimate(model, Sample(std::move(values)));
    });

    const detail::Moments m = detail::moments(estimates);
    return {mc.replications, mc.n, q, m.mean, m.var, smm_variance(model, q, mc.n)};
}

}  // namespace prevalence
