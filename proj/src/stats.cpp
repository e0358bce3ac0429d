#include "volvar/stats.hpp"

#include "volvar/error.hpp"
#include "volvar/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace volvar {

std::vector<double> autocorrelations(std::span<const double> values, std::size_t max_lag) {
    const std::size_t n = values.size();
    if (n <= max_lag) fail(ErrorCode::TooFewObservations, "autocorrelation lag exceeds series length");
    const double m = mean(values);
    CompensatedSum denom;
    for (double v : values) denom.add((v - m) * (v - m));
    if (!(denom.value() > 0.0)) fail(ErrorCode::ZeroVariance, "autocorrelation of a constant series");
    std::vector<double> rho(max_lag);
    for (std::size_t k = 1; k <= max_lag; ++k) {
        CompensatedSum num;
        for (std::size_t t = 0; t + k < n; ++t) num.add((values[t] - m) * (values[t + k] - m));
        rho[k - 1] = num.value() / denom.value();
    }
    return rho;
}

double ljung_box(std::span<const double> rho, std::size_t n, std::size_t lags) {
    if (lags > rho.size() || lags >= n) fail(ErrorCode::TooFewObservations, "Ljung-Box lag out of range");
    const double nd = static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) acc += rho[k - 1] * rho[k - 1] / (nd - static_cast<double>(k));
    return nd * (nd + 2.0) * acc;
}

double jarque_bera(std::size_t n, double skewness, double kurtosis) {
    const double excess = kurtosis - 3.0;
    return static_cast<double>(n) / 6.0 * (skewness * skewness + excess * excess / 4.0);
}

StatsReport descriptive_stats(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 21) fail(ErrorCode::TooFewObservations, "descriptive stats need at least 21 observations");

    StatsReport r;
    r.mean = mean(values);
    r.std = sample_std(values);
    if (!(r.std > 0.0)) fail(ErrorCode::ZeroVariance, "descriptive stats of a constant series");

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    r.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    CompensatedSum m2, m3, m4;
    for (double v : values) {
        const double d = v - r.mean;
        m2.add(d * d);
        m3.add(d * d * d);
        m4.add(d * d * d * d);
    }
    const double nd = static_cast<double>(n);
    const double c2 = m2.value() / nd, c3 = m3.value() / nd, c4 = m4.value() / nd;
    r.skewness = c3 / std::pow(c2, 1.5);
    r.kurtosis = c4 / (c2 * c2);
    r.jarque_bera = jarque_bera(n, r.skewness, r.kurtosis);

    const auto rho = autocorrelations(values, 20);
    r.q5 = ljung_box(rho, n, 5);
    r.q10 = ljung_box(rho, n, 10);
    r.q20 = ljung_box(rho, n, 20);
    return r;
}

std::string stats_csv(std::span<const NamedStats> rows) {
    std::string out = "series,mean,median,std,skewness,kurtosis,jarque_bera,q5,q10,q20\n";
    char buf[64];
    for (const auto& row : rows) {
        out += row.series;
        const auto& s = row.stats;
        for (double v : {s.mean, s.median, s.std, s.skewness, s.kurtosis, s.jarque_bera, s.q5, s.q10, s.q20}) {
            std::snprintf(buf, sizeof(buf), ",%.4g", v);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace volvar
