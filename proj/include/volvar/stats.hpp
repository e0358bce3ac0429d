#pragma once

#include <span>
#include <string>
#include <vector>

namespace volvar {

struct StatsReport {
    double mean = 0.0;
    double median = 0.0;
    double std = 0.0;       // sample (n - 1)
    double skewness = 0.0;  // m3 / m2^1.5, central moments with 1/n
    double kurtosis = 0.0;  // m4 / m2^2, not excess
    double jarque_bera = 0.0;
    double q5 = 0.0;
    double q10 = 0.0;
    double q20 = 0.0;
};

// Biased sample autocorrelation at lags 1..max_lag (denominator n, overall mean).
std::vector<double> autocorrelations(std::span<const double> values, std::size_t max_lag);

// Ljung-Box Q(s) = n(n+2) * sum_{k=1..s} rho_k^2 / (n - k), with rho indexed from lag 1.
double ljung_box(std::span<const double> rho, std::size_t n, std::size_t lags);

double jarque_bera(std::size_t n, double skewness, double kurtosis);

// Requires at least 21 observations and non-zero variance.
StatsReport descriptive_stats(std::span<const double> values);

struct NamedStats {
    std::string series;
    StatsReport stats;
};

// CSV, 4 significant digits:
// series,mean,median,std,skewness,kurtosis,jarque_bera,q5,q10,q20
std::string stats_csv(std::span<const NamedStats> rows);

}  // namespace volvar
