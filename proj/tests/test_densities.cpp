#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "prevalence/densities.hpp"
#include "prevalence/efficiency.hpp"

using namespace prevalence;
using Catch::Approx;

namespace {
const BinormalModel standard(0.0, 2.0, 1.0);
}

TEST_CASE("mixture_density reduces to the class-conditionals at q = 0 and q = 1", "[densities]") {
    CHECK(mixture_density(MixtureModel(standard, 0.0), 0.0) == Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(mixture_density(MixtureModel(standard, 1.0), 2.0) == Approx(0.3989422804014327).epsilon(1e-14));
}

TEST_CASE("mixture_density at the midpoint equals phi(1)", "[densities]") {
    // 0.8 phi(1) + 0.2 phi(-1) = phi(1)
    CHECK(mixture_density(MixtureModel(standard, 0.2), 1.0) == Approx(0.24197072451914337).epsilon(1e-14));
}

TEST_CASE("mixture_density rejects non-finite x", "[densities]") {
    const MixtureModel m(standard, 0.3);
    CHECK_THROWS_AS(mixture_density(m, std::numeric_limits<double>::infinity()), DomainError);
    CHECK_THROWS_AS(mixture_density(m, std::nan("")), DomainError);
}

TEST_CASE("likelihood_ratio closed form exp(2x - 2)", "[densities]") {
    CHECK(likelihood_ratio(standard, 1.0) == Approx(1.0).epsilon(1e-15));
    CHECK(likelihood_ratio(standard, 0.0) == Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(likelihood_ratio(standard, 2.0) == Approx(std::exp(2.0)).epsilon(1e-14));
    CHECK(likelihood_ratio(standard, 2.0) == Approx(7.38905609893065).epsilon(1e-13));
}

TEST_CASE("log ratio stays finite where the density quotient would overflow", "[densities]") {
    const BinormalModel wide(0.0, 2.0, 1.0);
    // f0(60) and f1(60) both underflow to zero in double.
    CHECK(oracle::normal_pdf(60.0) == 0.0);
    CHECK(wide.log_ratio(60.0) == Approx(118.0));
    CHECK(std::isfinite(wide.log_ratio(-1e6)));
}

TEST_CASE("binormal parameters are validated", "[densities]") {
    CHECK_THROWS_AS(BinormalModel(1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(BinormalModel(2.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(BinormalModel(0.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(BinormalModel(0.0, std::nan(""), 1.0), DomainError);
    CHECK_THROWS_AS(MixtureModel(standard, 1.5), DomainError);
    CHECK_THROWS_AS(MixtureModel(standard, -0.1), DomainError);
}

TEST_CASE("Sample requires at least one finite value", "[densities]") {
    CHECK_THROWS_AS(Sample(std::vector<double>{}), DomainError);
    CHECK_THROWS_AS(Sample({1.0, std::numeric_limits<double>::infinity()}), DomainError);
    const Sample s{1.0, 2.0, 6.0};
    CHECK(s.size() == 3);
    CHECK(s.mean() == Approx(3.0));
}

TEST_CASE("mixture density properties over random points", "[densities][property]") {
    std::mt19937_64 gen(20240611);
    std::uniform_real_distribution<double> xs(-8.0, 10.0);
    std::uniform_real_distribution<double> qs(0.0, 1.0);
    std::uniform_real_distribution<double> mus(0.05, 4.0);
    for (int i = 0; i < 2000; ++i) {
        const double mu1 = mus(gen);
        const BinormalModel pair(0.0, mu1, 1.0);
        const double x = xs(gen);
        const double q = qs(gen);
        const double f0 = oracle::normal_pdf(x);
        const double f1 = oracle::normal_pdf(x, mu1);
        const double f = mixture_density(MixtureModel(pair, q), x);
        const double rel = 1e-12;
        CHECK(f >= std::min(f0, f1) * (1 - rel));
        CHECK(f <= std::max(f0, f1) * (1 + rel));
        // Affine in q.
        CHECK(f == Approx(f0 + q * (f1 - f0)).epsilon(1e-11));
    }
}

TEST_CASE("binormal likelihood ratio is strictly increasing in x", "[densities][property]") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> xs(-30.0, 30.0);
    std::uniform_real_distribution<double> mus(0.01, 5.0);
    for (int i = 0; i < 2000; ++i) {
        const BinormalModel pair(0.0, mus(gen), 1.0);
        double a = xs(gen), b = xs(gen);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        CHECK(pair.log_ratio(a) < pair.log_ratio(b));
    }
}

TEST_CASE("mixture density integrates to one", "[densities][quadrature]") {
    for (double q : {0.0, 0.2, 0.5, 1.0}) {
        CAPTURE(q);
        CHECK(std::abs(mixture_mass(MixtureModel(standard, q)) - 1.0) <= 1e-6);
    }
}

TEST_CASE("sample_mixture at degenerate prevalences draws a single class", "[densities][sampling]") {
    // Each value is N(0,1) at q = 0 and N(2,1) at q = 1: check against the same seeded stream.
    const Sample zeros = sample_mixture(MixtureModel(standard, 0.0), 5, 11);
    const Sample ones = sample_mixture(MixtureModel(standard, 1.0), 5, 11);
    REQUIRE(zeros.size() == 5);
    REQUIRE(ones.size() == 5);
    // Same stream: one bernoulli draw and one normal per point, so the values differ by exactly mu1.
    for (std::size_t i = 0; i < 5; ++i) CHECK(ones.values()[i] - zeros.values()[i] == Approx(2.0).margin(1e-12));
}

TEST_CASE("sample_mixture mean matches q * mu1", "[densities][sampling]") {
    const std::size_t n = 100000;
    const Sample s = sample_mixture(MixtureModel(standard, 0.2), n, 42);
    // var X = 1 + q(1-q) mu1^2 = 1.64
    const double se = std::sqrt(1.64 / n);
    CHECK(std::abs(s.mean() - 0.4) <= 3.0 * se);
}

TEST_CASE("sample_mixture is deterministic given the seed", "[densities][sampling]") {
    const MixtureModel m(standard, 0.35);
    const Sample a = sample_mixture(m, 50, 99);
    const Sample b = sample_mixture(m, 50, 99);
    const Sample c = sample_mixture(m, 50, 100);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
    CHECK_THROWS_AS(sample_mixture(m, 0, 1), DomainError);
}

TEST_CASE("pairs without samplers report a capability error", "[densities][sampling]") {
    auto log_std = [](double x) { return -0.5 * x * x - 0.9189385332046727; };
    const FunctionDensityPair pair(log_std, [](double x) { return -0.5 * (x - 1) * (x - 1) - 0.9189385332046727; });
    CHECK_FALSE(pair.can_sample());
    CHECK_THROWS_AS(sample_mixture(MixtureModel(pair, 0.5), 3, 1), CapabilityError);
    CHECK(likelihood_ratio(pair, 0.5) == Approx(1.0));
}

TEST_CASE("Rng stream derivation is stable", "[densities][sampling]") {
    // Frozen first outputs pin the documented generator across builds.
    Rng rng(derive_seed(7, 0));
    const double u = rng.uniform();
    Rng again(derive_seed(7, 0));
    CHECK(again.uniform() == u);
    CHECK(derive_seed(7, 0) != derive_seed(7, 1));
    CHECK(derive_seed(7, 0) != derive_seed(8, 0));
    std::mt19937_64 reference(derive_seed(7, 0));
    CHECK(u == static_cast<double>(reference() >> 11) * 0x1.0p-53);
}
