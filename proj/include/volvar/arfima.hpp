#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace volvar {

// Binomial expansion weights of (1 - L)^d: w_0 = 1, w_k = w_{k-1} (k - 1 - d) / k.
std::vector<double> frac_diff_weights(double d, std::size_t count);

// y_t = sum_{k=0..min(t, truncation)} w_k x_{t-k}. Any finite d is accepted;
// the stationary range |d| < 0.5 is enforced by arfima_fit.
std::vector<double> frac_diff(std::span<const double> series, double d, std::size_t truncation);

struct ArfimaParams {
    double d = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
    double intercept = 0.0;  // ARMA constant on the differenced, demeaned series
    double mean = 0.0;       // sample mean removed before differencing
    double sigma2 = 0.0;     // CSS innovation variance
    double aic = 0.0;
    std::size_t truncation = 0;
};

struct ArfimaOptions {
    int max_p = 1;
    int max_q = 1;
    std::size_t truncation = 500;
};

struct ArfimaCandidate {
    double d = 0.0;
    int p = 0;
    int q = 0;
    double aic = 0.0;
};

struct ArfimaFit {
    ArfimaParams best;
    std::vector<ArfimaCandidate> grid;  // every finite grid point evaluated
};

// True when all roots of 1 - c_1 z - ... - c_k z^k lie outside the unit circle.
bool roots_outside_unit_circle(std::span<const double> coefficients);

// Grid d in {0, 0.05, ..., 0.45} x (p, q) <= maxima; ARMA by conditional sum of
// squares; minimum-AIC model wins. Needs at least 200 observations.
ArfimaFit arfima_fit(std::span<const double> log_rv, const ArfimaOptions& options = {});

// One-step-ahead forecast of the next value of the series whose full history
// (oldest first) is given.
double arfima_forecast(const ArfimaParams& params, std::span<const double> history);

}  // namespace volvar
