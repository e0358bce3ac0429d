#include "volvar/error.hpp"
#include "volvar/numeric.hpp"
#include "volvar/tails/gpd.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace volvar;

namespace {

std::vector<double> gpd_sample(std::size_t n, double xi, double beta, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& x : out) {
        const double v = 1.0 - u(rng);  // (0, 1]
        x = xi == 0.0 ? -beta * std::log(v) : beta / xi * (std::pow(v, -xi) - 1.0);
    }
    return out;
}

GpdFit fit_of(double xi, double beta, double u, std::size_t n, std::size_t n_u) {
    return GpdFit{xi, beta, u, n, n_u, Tail::Right};
}

}  // namespace

TEST(GpdCdf, HandValues) {
    EXPECT_NEAR(gpd_cdf(0.0, 1.0, 1.0), 0.632121, 1e-6);
    EXPECT_NEAR(gpd_cdf(0.2, 1.0, 1.0), 1.0 - std::pow(1.2, -5.0), 1e-15);
    EXPECT_NEAR(gpd_cdf(0.2, 1.0, 1.0), 0.598122, 1e-6);
    EXPECT_EQ(gpd_cdf(0.3, 2.0, 0.0), 0.0);
}

TEST(GpdCdf, SupportAndMonotonicity) {
    EXPECT_EQ(gpd_cdf(-0.5, 1.0, 2.0), 1.0);
    EXPECT_THROW(gpd_cdf(-0.5, 1.0, 2.5), Error);
    EXPECT_THROW(gpd_cdf(0.2, 1.0, -0.1), Error);
    double prev = -1.0;
    for (double x = 0.0; x < 20.0; x += 0.25) {
        const double f = gpd_cdf(0.3, 1.5, x);
        EXPECT_GE(f, prev);
        EXPECT_LE(f, 1.0);
        prev = f;
    }
}

TEST(GpdCdf, ContinuousInXiAtZero) {
    for (double beta : {0.5, 1.3}) {
        for (double x = 0.0; x <= 10.0 * beta; x += beta / 8.0) {
            EXPECT_LT(std::abs(gpd_cdf(1e-11, beta, x) - gpd_cdf(0.0, beta, x)), 1e-8);
            EXPECT_LT(std::abs(gpd_cdf(-1e-11, beta, x) - gpd_cdf(0.0, beta, x)), 1e-8);
        }
    }
}

TEST(GpdDensity, IntegratesToCdf) {
    // Trapezoid integral of exp(log density) against the closed-form cdf.
    for (double xi : {-0.2, 0.0, 0.25}) {
        const double beta = 1.4, upper = 3.0;
        const int steps = 20000;
        double area = 0.0;
        for (int i = 0; i < steps; ++i) {
            const double a = upper * i / steps, b = upper * (i + 1) / steps;
            area += 0.5 * (b - a) * (std::exp(gpd_log_density(xi, beta, a)) + std::exp(gpd_log_density(xi, beta, b)));
        }
        EXPECT_NEAR(area, gpd_cdf(xi, beta, upper), 1e-7) << xi;
    }
}

TEST(EvtQuantile, HandValues) {
    EXPECT_NEAR(evt_quantile(fit_of(0.0, 1.0, 2.0, 1000, 50), 0.01), 2.0 + std::log(5.0), 1e-12);
    EXPECT_NEAR(evt_quantile(fit_of(0.0, 1.0, 2.0, 1000, 50), 0.01), 3.60944, 1e-5);
    EXPECT_NEAR(evt_quantile(fit_of(0.2, 1.0, 2.0, 1000, 50), 0.01), 2.0 + 5.0 * (std::pow(0.2, -0.2) - 1.0), 1e-12);
    EXPECT_NEAR(evt_quantile(fit_of(0.2, 1.0, 2.0, 1000, 50), 0.01), 3.89865, 1e-5);
}

TEST(EvtQuantile, BoundaryAndErrors) {
    EXPECT_DOUBLE_EQ(evt_quantile(fit_of(0.2, 1.0, 2.0, 1000, 50), 0.05), 2.0);
    try {
        evt_quantile(fit_of(0.2, 1.0, 2.0, 1000, 50), 0.06);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::QuantileNotInTail);
    }
}

TEST(EvtQuantile, LimitContinuityAndMonotonicity) {
    for (double u : {0.5, 1.65}) {
        for (double beta : {0.4, 1.0, 2.5}) {
            for (double p0 : {0.001, 0.01, 0.04}) {
                const double limit = u + beta * std::log(60.0 / (1000.0 * p0));
                EXPECT_NEAR(evt_quantile(fit_of(1e-11, beta, u, 1000, 60), p0), limit, 1e-6);
                EXPECT_NEAR(evt_quantile(fit_of(-1e-11, beta, u, 1000, 60), p0), limit, 1e-6);
            }
            double prev = 1e300;
            for (double p0 = 0.001; p0 <= 0.06; p0 += 0.001) {
                const double q = evt_quantile(fit_of(0.15, beta, u, 1000, 60), p0);
                EXPECT_LT(q, prev);
                prev = q;
            }
        }
    }
}

TEST(EvtQuantile, InvertsTheTailEstimator) {
    // The tail estimator 1 - F(x) = (n_u / n) (1 - G(x - u)) evaluated at the
    // quantile returns p0.
    const auto f = fit_of(0.25, 0.8, 1.65, 2000, 150);
    for (double p0 : {0.001, 0.01, 0.05}) {
        const double q = evt_quantile(f, p0);
        EXPECT_NEAR(150.0 / 2000.0 * (1.0 - gpd_cdf(f.xi, f.beta, q - f.u)), p0, 1e-12);
    }
}

TEST(GpdMle, RecoversParameters) {
    const auto x = gpd_sample(20000, 0.2, 1.0, 3);
    const auto est = gpd_mle(x);
    EXPECT_NEAR(est.xi, 0.2, 0.04);
    EXPECT_NEAR(est.beta, 1.0, 0.04);
    EXPECT_NEAR(est.log_likelihood, gpd_log_likelihood(est.xi, est.beta, x), 1e-9);
    // The profile optimum beats nearby points.
    for (double dx : {-0.01, 0.01}) {
        for (double db : {-0.01, 0.0, 0.01}) {
            EXPECT_LE(gpd_log_likelihood(est.xi + dx, est.beta + db, x), est.log_likelihood + 1e-9);
        }
    }
}

TEST(GpdMle, ExponentialDataGivesXiNearZero) {
    const auto x = gpd_sample(50000, 0.0, 2.0, 4);
    const auto est = gpd_mle(x);
    EXPECT_GE(est.xi, -0.03);
    EXPECT_LE(est.xi, 0.03);
    EXPECT_NEAR(est.beta, 2.0, 0.08);
}

TEST(GpdMle, TooFewExcesses) {
    try {
        gpd_mle(gpd_sample(10, 0.2, 1.0, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientExceedances);
    }
}

TEST(FitGpd, ThresholdAndTailOrientation) {
    auto z = volvar::testing::normal_sample(5000, 6);
    for (auto& v : z) v = std::abs(v) > 1.0 ? v * 1.5 : v;
    const auto s = standardize(z);
    const auto right = fit_gpd(s, Tail::Right);
    const auto left = fit_gpd(s, Tail::Left);
    EXPECT_NEAR(right.u, 1.65 * sample_std(s.values), 1e-12);
    EXPECT_EQ(right.n, s.values.size());
    std::size_t above = 0, below = 0;
    for (double v : s.values) {
        above += v > right.u;
        below += -v > left.u;
    }
    EXPECT_EQ(right.n_u, above);
    EXPECT_EQ(left.n_u, below);
    EXPECT_GT(right.beta, 0.0);
    for (double e : exceedances(s.values, left.u, Tail::Left)) EXPECT_GT(e, 0.0);
}

TEST(SelectThreshold, ScalesWithTheSampleStd) {
    const auto z = standardize(volvar::testing::normal_sample(1000, 7));
    EXPECT_NEAR(select_threshold(z, Tail::Right), 1.65, 1e-12);
    EXPECT_NEAR(select_threshold(z, Tail::Left), 1.65, 1e-12);
    StandardizedReturns doubled = z;
    for (auto& v : doubled.values) v *= 2.0;
    EXPECT_NEAR(select_threshold(doubled, Tail::Right), 3.3, 1e-12);
}

TEST(Exceedances, HandValues) {
    const std::vector<double> up{3.0}, down{-3.0}, small{0.5, -1.0};
    EXPECT_NEAR(exceedances(up, 1.65, Tail::Right).at(0), 1.35, 1e-15);
    EXPECT_NEAR(exceedances(down, 1.65, Tail::Left).at(0), 1.35, 1e-15);
    EXPECT_TRUE(exceedances(small, 1.65, Tail::Right).empty());
    EXPECT_TRUE(exceedances(up, 1.65, Tail::Left).empty());
}
