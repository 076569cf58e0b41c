#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "prevalence/experiments.hpp"
#include "prevalence/smm.hpp"

using namespace prevalence;
using Catch::Approx;

TEST_CASE("smm_estimate", "[smm]") {
    const BinormalModel m(0.0, 2.0, 1.0);
    CHECK(smm_estimate(m, Sample{-1.0, 1.0}) == Approx(0.0).margin(1e-15));
    CHECK(smm_estimate(m, Sample{1.0, 3.0}) == Approx(1.0));
    CHECK(smm_estimate(m, Sample{0.0, 2.0}) == Approx(0.5));
    // mu0 != 0
    CHECK(smm_estimate(BinormalModel(1.0, 3.0, 1.0), Sample{2.5}) == Approx(0.75));
}

TEST_CASE("smm_report keeps the raw value and clips separately", "[smm]") {
    const BinormalModel m(0.0, 2.0, 1.0);
    const SmmReport r = smm_report(m, Sample{-3.0, -2.0});
    CHECK(r.q_hat == Approx(-1.25));
    CHECK(r.q_hat_clipped == 0.0);
    CHECK(r.exact_sd == Approx(std::sqrt(r.exact_var)));
    CHECK(r.exact_var == Approx(0.25 / 2.0));
    CHECK(smm_report(m, Sample{7.0}).q_hat_clipped == 1.0);
}

TEST_CASE("smm_variance", "[smm]") {
    CHECK(smm_variance(BinormalModel(0, 1, 1), 0.2, 100) == Approx(0.0116).epsilon(1e-14));
    CHECK(std::abs(std::sqrt(smm_variance(BinormalModel(0, 1, 1), 0.2, 100)) - 0.1077) <= 5e-5);
    CHECK(std::abs(std::sqrt(smm_variance(BinormalModel(0, 0.05, 1), 0.2, 100)) - 2.0004) <= 5e-5);
    CHECK(smm_variance(BinormalModel(0, 2, 1), 0.0, 100) == Approx(0.0025).epsilon(1e-14));
    CHECK_THROWS_AS(smm_variance(BinormalModel(0, 2, 1), 1.2, 100), DomainError);
    CHECK_THROWS_AS(smm_variance(BinormalModel(0, 2, 1), 0.2, 0), DomainError);
    CHECK_THROWS_AS(BinormalModel(1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("smm_variance general form is invariant to a location shift", "[smm]") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> shift(-5.0, 5.0), qs(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double s = shift(gen), q = qs(gen);
        CHECK(smm_variance(BinormalModel(s, s + 1.5, 0.7), q, 50) ==
              Approx(smm_variance(BinormalModel(0.0, 1.5, 0.7), q, 50)).epsilon(1e-12));
    }
}

TEST_CASE("smm_variance matches Monte Carlo with mu0 != 0", "[smm][stochastic]") {
    const BinormalModel m(-1.0, 1.5, 1.3);
    MonteCarloSettings mc;
    mc.n = 40;
    mc.replications = 40000;
    mc.seed = 8;
    const SmmMonteCarloSummary s = monte_carlo_smm(m, 0.35, mc);
    CHECK(std::abs(s.var_q_hat / s.exact_var - 1.0) <= 0.03);
    CHECK(std::abs(s.mean_q_hat - 0.35) <= 3.0 * std::sqrt(s.exact_var / mc.replications));
}

TEST_CASE("auc", "[smm]") {
    CHECK(std::abs(auc(BinormalModel(0, 2, 1)) - 0.9214) <= 5e-5);
    CHECK(std::abs(auc(BinormalModel(0, 1, 1)) - 0.7602) <= 5e-5);
    CHECK(auc(BinormalModel(0, 1e-12, 1)) == Approx(0.5).margin(1e-12));
    // Phi(sqrt 2), 20 digits.
    CHECK(auc(BinormalModel(0, 2, 1)) == Approx(0.92135039647485743).epsilon(1e-15));
    // Scale invariance.
    CHECK(auc(BinormalModel(3, 7, 2)) == Approx(auc(BinormalModel(0, 2, 1))).epsilon(1e-15));
}

TEST_CASE("auc is strictly increasing in separation", "[smm][property]") {
    double previous = 0.5;
    for (double gap = 0.01; gap < 8.0; gap += 0.01) {
        const double a = auc(BinormalModel(0.0, gap, 1.0));
        CHECK(a > previous);
        previous = a;
    }
}

TEST_CASE("normal quantile inverts normal_cdf", "[smm]") {
    for (double p : {1e-10, 0.001, 0.025, 0.3, 0.5, 0.76, 0.975, 0.999999}) {
        CAPTURE(p);
        CHECK(normal_cdf(normal_quantile(p)) == Approx(p).epsilon(1e-13));
    }
    CHECK(normal_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-14));
    CHECK(separation_for_auc(auc(BinormalModel(0, 1.234, 1))) == Approx(1.234).epsilon(1e-12));
    CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(separation_for_auc(0.5), DomainError);
}
