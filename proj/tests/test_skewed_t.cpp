#include "volvar/error.hpp"
#include "volvar/tails/skewed_t.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace volvar;

namespace {

// Fernandez-Steel draw: positive side with probability gamma^2 / (1 + gamma^2),
// stretched by gamma; negative side shrunk by 1/gamma.
std::vector<double> skst_sample(std::size_t n, double nu, double gamma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::student_t_distribution<double> t(nu);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double p_pos = gamma * gamma / (1.0 + gamma * gamma);
    std::vector<double> out(n);
    for (auto& x : out) {
        const double a = std::abs(t(rng));
        x = u(rng) < p_pos ? gamma * a : -a / gamma;
    }
    return out;
}

// The density has a kink at loc, so each half-line is integrated on its own.
double quadrature_cdf(const SkstFit& f, double x) {
    boost::math::quadrature::exp_sinh<double> integrator;
    const auto pdf = [&](double s) { return skst_pdf(f, s); };
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (x <= f.loc) return integrator.integrate(pdf, -inf, x);
    const double left = integrator.integrate(pdf, -inf, f.loc);
    return left + (integrator.integrate(pdf, f.loc, inf) - integrator.integrate(pdf, x, inf));
}

}  // namespace

TEST(SkstDensity, IntegratesToOne) {
    for (const SkstFit f : {SkstFit{5, 1.0, 0, 1, 0}, SkstFit{6, 1.5, 0.3, 0.8, 0}, SkstFit{3.5, 0.7, -1, 2, 0}}) {
        EXPECT_NEAR(quadrature_cdf(f, f.loc) + (1.0 - quadrature_cdf(f, f.loc)), 1.0, 1e-12);
        boost::math::quadrature::exp_sinh<double> integrator;
        const auto pdf = [&](double s) { return skst_pdf(f, s); };
        const double total = integrator.integrate(pdf, -std::numeric_limits<double>::infinity(), f.loc) +
                             integrator.integrate(pdf, f.loc, std::numeric_limits<double>::infinity());
        EXPECT_NEAR(total, 1.0, 1e-6);
        EXPECT_NEAR(std::log(skst_pdf(f, 0.37)), skst_log_pdf(f, 0.37), 1e-12);
    }
}

TEST(SkstCdf, MatchesQuadrature) {
    const SkstFit f{6, 1.5, 0.1, 1.2, 0};
    for (double x : {-4.0, -1.0, 0.0, 0.1, 0.5, 2.0, 6.0}) {
        EXPECT_NEAR(skst_cdf(f, x), quadrature_cdf(f, x), 1e-9) << x;
    }
}

TEST(SkstQuantile, RoundTripAndMonotone) {
    for (const SkstFit f : {SkstFit{5, 1.0, 0, 1, 0}, SkstFit{6, 1.5, 0.3, 0.8, 0}, SkstFit{4, 0.6, 0, 1.5, 0}}) {
        double prev = -1e300;
        for (double p : {0.001, 0.01, 0.05, 0.3, 0.5, 0.7, 0.95, 0.99, 0.999}) {
            const double q = skst_quantile(f, p);
            EXPECT_NEAR(skst_cdf(f, q), p, 1e-9);
            EXPECT_GT(q, prev);
            prev = q;
        }
        for (double p : {0.01, 0.05, 0.5, 0.95, 0.99}) {
            EXPECT_NEAR(quadrature_cdf(f, skst_quantile(f, p)), p, 1e-9);
        }
    }
    EXPECT_NEAR(skst_quantile(SkstFit{5, 1.0, 0.4, 2.0, 0}, 0.5), 0.4, 1e-12);
    EXPECT_THROW(skst_quantile(SkstFit{}, 0.0), Error);
    EXPECT_THROW(skst_quantile(SkstFit{}, 1.0), Error);
}

TEST(SkstFit, SymmetricSampleHasNoSkew) {
    const auto x = skst_sample(50000, 5.0, 1.0, 21);
    const auto f = skst_fit(x);
    EXPECT_NEAR(f.gamma, 1.0, 0.05);
    EXPECT_NEAR(f.nu, 5.0, 0.6);
}

TEST(SkstFit, RecoversSkewAcrossSeeds) {
    int hits = 0;
    const int seeds = 5;
    for (int s = 0; s < seeds; ++s) {
        const auto f = skst_fit(skst_sample(50000, 6.0, 1.5, 300 + s));
        if (f.gamma >= 1.4 && f.gamma <= 1.6) ++hits;
    }
    EXPECT_GE(hits, static_cast<int>(std::ceil(0.9 * seeds)));
}

TEST(SkstFit, NeverWorseThanSymmetricT) {
    for (int s = 0; s < 5; ++s) {
        const auto x = skst_sample(800, 4.0 + s, 0.8 + 0.1 * s, 40 + s);
        const auto f = skst_fit(x);
        const auto sym = symmetric_t_fit(x, f.nu, 0.0, 1.0);
        EXPECT_GE(f.log_likelihood, sym.log_likelihood - 1e-9);
        EXPECT_NEAR(f.log_likelihood, skst_log_likelihood(f, x), 1e-8);
    }
}

TEST(SkstFit, TooFewObservations) {
    EXPECT_THROW(skst_fit(skst_sample(99, 5, 1, 1)), Error);
}
