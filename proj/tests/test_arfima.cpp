#include "volvar/arfima.hpp"
#include "volvar/error.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace volvar;

namespace {

// ARFIMA(0, d, 0) via the MA(infinity) expansion of (1 - L)^-d.
std::vector<double> fractional_noise(std::size_t n, double d, std::uint64_t seed) {
    const std::size_t burn = 2000;
    const auto psi = frac_diff_weights(-d, n + burn);
    const auto e = volvar::testing::normal_sample(n + burn, seed);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t tt = t + burn;
        double s = 0.0;
        for (std::size_t k = 0; k <= tt; ++k) s += psi[k] * e[tt - k];
        x[t] = s;
    }
    return x;
}

}  // namespace

TEST(FracDiff, ZeroOrderIsIdentity) {
    const std::vector<double> x{1.5, -2.0, 0.25, 4.0};
    EXPECT_EQ(frac_diff(x, 0.0, 4), x);
}

TEST(FracDiff, UnitOrderIsFirstDifference) {
    const std::vector<double> x{3.0, 5.5};
    const auto y = frac_diff(x, 1.0, 1);
    EXPECT_DOUBLE_EQ(y[1], 2.5);
}

TEST(FracDiff, ImpulseResponseWeights) {
    const std::vector<double> impulse{1, 0, 0, 0};
    const auto y = frac_diff(impulse, 0.4, 4);
    EXPECT_NEAR(y[0], 1.0, 1e-15);
    EXPECT_NEAR(y[1], -0.4, 1e-15);
    EXPECT_NEAR(y[2], -0.12, 1e-15);
    EXPECT_NEAR(y[3], -0.064, 1e-15);
    const auto w = frac_diff_weights(0.4, 50);
    for (std::size_t k = 1; k < w.size(); ++k) {
        EXPECT_EQ(w[k], w[k - 1] * (static_cast<double>(k) - 1.0 - 0.4) / static_cast<double>(k));
    }
}

TEST(FracDiff, TruncationLimitsTheSum) {
    const std::vector<double> x{1, 1, 1, 1, 1};
    const auto y = frac_diff(x, 0.3, 2);
    const auto w = frac_diff_weights(0.3, 3);
    EXPECT_NEAR(y[4], w[0] + w[1] + w[2], 1e-15);
    EXPECT_THROW(frac_diff(x, 0.3, 6), Error);
}

TEST(RootsOutsideUnitCircle, Basic) {
    EXPECT_TRUE(roots_outside_unit_circle(std::vector<double>{0.5}));
    EXPECT_FALSE(roots_outside_unit_circle(std::vector<double>{1.2}));
    EXPECT_TRUE(roots_outside_unit_circle(std::vector<double>{0.5, 0.3}));
    EXPECT_FALSE(roots_outside_unit_circle(std::vector<double>{0.5, 0.6}));
    EXPECT_TRUE(roots_outside_unit_circle(std::vector<double>{}));
}

TEST(ArfimaFit, WhiteNoiseSelectsNoStructure) {
    // d alone: white noise should land within one grid step of zero.
    int d_hits = 0, order_hits = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        const auto x = volvar::testing::normal_sample(2000, 500 + s);
        if (arfima_fit(x, {0, 0, 500}).best.d <= 0.05 + 1e-12) ++d_hits;
        const auto fit = arfima_fit(x, {1, 1, 500});
        if (fit.best.ar.empty() && fit.best.ma.empty() && fit.best.d <= 0.05 + 1e-12) ++order_hits;
    }
    EXPECT_GE(d_hits, static_cast<int>(0.9 * seeds));
    // AIC admits each spurious extra term with probability P(chi2_1 > 2) ~ 0.157,
    // so with three ARMA alternatives roughly 70% of white-noise fits stay empty.
    EXPECT_GE(order_hits, static_cast<int>(0.5 * seeds));
}

TEST(ArfimaFit, RecoversFractionalOrder) {
    int hits = 0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
        const auto x = fractional_noise(5000, 0.3, 900 + s);
        const auto fit = arfima_fit(x, {1, 1, 500});
        if (std::abs(fit.best.d - 0.3) <= 0.1 + 1e-12) ++hits;
    }
    EXPECT_GE(hits, static_cast<int>(0.8 * seeds));
}

TEST(ArfimaFit, ChosenModelHasMinimumAicAndValidRoots) {
    const auto x = fractional_noise(600, 0.2, 3);
    const auto fit = arfima_fit(x, {2, 2, 300});
    for (const auto& c : fit.grid) {
        EXPECT_LE(fit.best.aic, c.aic);
        EXPECT_LE(c.p, 2);
        EXPECT_LE(c.q, 2);
    }
    EXPECT_TRUE(roots_outside_unit_circle(fit.best.ar));
    std::vector<double> neg_ma;
    for (double m : fit.best.ma) neg_ma.push_back(-m);
    EXPECT_TRUE(roots_outside_unit_circle(neg_ma));
    EXPECT_GE(fit.best.d, 0.0);
    EXPECT_LT(fit.best.d, 0.5);
}

TEST(ArfimaFit, TooShort) {
    EXPECT_THROW(arfima_fit(volvar::testing::normal_sample(150, 1)), Error);
}

TEST(ArfimaForecast, WhiteNoiseForecastIsTheMean) {
    ArfimaParams p;
    p.mean = 2.5;
    p.truncation = 100;
    const auto x = volvar::testing::normal_sample(300, 4);
    EXPECT_NEAR(arfima_forecast(p, x), 2.5, 1e-12);
}

TEST(ArfimaForecast, PureArOneStep) {
    ArfimaParams p;
    p.ar = {0.6};
    p.mean = 1.0;
    p.truncation = 100;
    const std::vector<double> x{0.0, 1.0, 3.0};
    // Demeaned last value 2, so the forecast is 1 + 0.6 * 2.
    EXPECT_NEAR(arfima_forecast(p, x), 2.2, 1e-12);
}
