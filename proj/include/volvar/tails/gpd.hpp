#pragma once

#include "volvar/marketdata.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace volvar {

enum class Tail { Left, Right };

std::string_view to_string(Tail tail);

// Peaks-over-threshold fit. The left tail is handled by negating the series,
// so u and every excess are positive magnitudes in tail orientation.
struct GpdFit {
    double xi = 0.0;
    double beta = 1.0;
    double u = 0.0;
    std::size_t n = 0;
    std::size_t n_u = 0;
    Tail tail = Tail::Right;
};

inline constexpr double kThresholdMultiple = 1.65;
inline constexpr double kXiZeroBand = 1e-10;
inline constexpr std::size_t kMinExceedances = 30;

// 1.65 x sample std of the tail-oriented series.
double select_threshold(const StandardizedReturns& returns, Tail tail);

// Right: {x - u : x > u}; left: {-x - u : -x > u}.
std::vector<double> exceedances(std::span<const double> returns, double u, Tail tail);

double gpd_cdf(double xi, double beta, double x);
double gpd_log_density(double xi, double beta, double x);
double gpd_log_likelihood(double xi, double beta, std::span<const double> excesses);

struct GpdEstimate {
    double xi = 0.0;
    double beta = 1.0;
    double log_likelihood = 0.0;
};

// Profile likelihood over xi in [-0.45, 0.95] (golden section) with the scale
// solved from its score equation at each xi. Needs at least 30 excesses.
GpdEstimate gpd_mle(std::span<const double> excesses);

// Threshold, exceedances and MLE in one step.
GpdFit fit_gpd(const StandardizedReturns& returns, Tail tail);

// Tail-oriented (1 - p0) quantile: u + beta/xi * ((p0 n / n_u)^(-xi) - 1),
// with the xi -> 0 limit u + beta ln(n_u / (n p0)).
double evt_quantile(const GpdFit& fit, double p0);

}  // namespace volvar
