#include "volvar/tails/gpd.hpp"

#include "volvar/error.hpp"
#include "volvar/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace volvar {

std::string_view to_string(Tail tail) { return tail == Tail::Left ? "left" : "right"; }

double select_threshold(const StandardizedReturns& returns, Tail tail) {
    // Negation leaves the standard deviation unchanged.
    (void)tail;
    const double s = sample_std(returns.values);
    if (!(s > 0.0)) fail(ErrorCode::ZeroVariance, "threshold of a constant series");
    return kThresholdMultiple * s;
}

std::vector<double> exceedances(std::span<const double> returns, double u, Tail tail) {
    if (!std::isfinite(u)) fail(ErrorCode::InvalidParameter, "threshold must be finite");
    std::vector<double> out;
    for (double x : returns) {
        const double oriented = tail == Tail::Left ? -x : x;
        if (oriented > u) out.push_back(oriented - u);
    }
    return out;
}

double gpd_cdf(double xi, double beta, double x) {
    if (!(beta > 0.0)) fail(ErrorCode::InvalidParameter, "GPD scale must be positive");
    if (x < 0.0) fail(ErrorCode::OutsideSupport, "GPD support starts at 0");
    if (std::abs(xi) < kXiZeroBand) return -std::expm1(-x / beta);
    if (xi < 0.0) {
        const double upper = -beta / xi;
        if (x > upper) fail(ErrorCode::OutsideSupport, "x beyond the GPD upper endpoint");
        if (x == upper) return 1.0;
    }
    return -std::expm1(-std::log1p(xi * x / beta) / xi);
}

double gpd_log_density(double xi, double beta, double x) {
    if (!(beta > 0.0) || x < 0.0) return -std::numeric_limits<double>::infinity();
    if (std::abs(xi) < kXiZeroBand) return -std::log(beta) - x / beta;
    const double arg = xi * x / beta;
    if (arg <= -1.0) return -std::numeric_limits<double>::infinity();
    return -std::log(beta) - (1.0 + 1.0 / xi) * std::log1p(arg);
}

double gpd_log_likelihood(double xi, double beta, std::span<const double> excesses) {
    CompensatedSum ll;
    for (double x : excesses) ll.add(gpd_log_density(xi, beta, x));
    return ll.value();
}

namespace {

constexpr double kXiLower = -0.45;
constexpr double kXiUpper = 0.95;

// Root of (1 + xi) * sum x / (beta + xi x) = n, the scale score equation at
// fixed xi. The left side falls strictly in beta on the feasible range.
double solve_scale(double xi, std::span<const double> x, double x_max, double x_mean) {
    const double n = static_cast<double>(x.size());
    auto score = [&](double beta, double* slope) {
        double s = 0.0, ds = 0.0;
        for (double v : x) {
            const double den = beta + xi * v;
            s += v / den;
            ds += v / (den * den);
        }
        if (slope) *slope = -(1.0 + xi) * ds;
        return (1.0 + xi) * s - n;
    };

    double lo = xi < 0.0 ? -xi * x_max : 0.0;
    double hi = std::max(x_mean, lo) * 2.0 + 1e-300;
    int guard = 0;
    while (score(hi, nullptr) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 200) fail(ErrorCode::NonConvergence, "GPD scale bracket did not close");
    }

    double beta = std::max(x_mean * (1.0 - xi), 0.5 * (lo + hi));
    if (!(beta > lo && beta < hi)) beta = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double slope = 0.0;
        const double g = score(beta, &slope);
        if (g > 0.0) lo = beta; else hi = beta;
        double next = beta - g / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - beta) <= 1e-14 * beta || hi - lo <= 1e-15 * hi) return next;
        beta = next;
    }
    return beta;
}

}  // namespace

GpdEstimate gpd_mle(std::span<const double> excesses) {
    if (excesses.size() < kMinExceedances) {
        fail(ErrorCode::InsufficientExceedances,
             "GPD fit needs at least 30 excesses, got " + std::to_string(excesses.size()));
    }
    double x_max = 0.0;
    for (double v : excesses) {
        if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::InvalidParameter, "excesses must be positive and finite");
        x_max = std::max(x_max, v);
    }
    const double x_mean = mean(excesses);

    auto profile = [&](double xi) {
        if (std::abs(xi) < kXiZeroBand) return gpd_log_likelihood(0.0, x_mean, excesses);
        const double beta = solve_scale(xi, excesses, x_max, x_mean);
        return gpd_log_likelihood(xi, beta, excesses);
    };

    const auto best = golden_section_maximize(profile, kXiLower, kXiUpper, 1e-7, 200);
    GpdEstimate est;
    const double exponential_ll = gpd_log_likelihood(0.0, x_mean, excesses);
    if (!std::isfinite(best.value) && !std::isfinite(exponential_ll)) {
        fail(ErrorCode::NonConvergence, "GPD likelihood is not finite anywhere on the search interval");
    }
    if (best.value >= exponential_ll && std::abs(best.x) >= kXiZeroBand) {
        est.xi = best.x;
        est.beta = solve_scale(best.x, excesses, x_max, x_mean);
        est.log_likelihood = best.value;
    } else {
        est.xi = 0.0;
        est.beta = x_mean;
        est.log_likelihood = exponential_ll;
    }
    return est;
}

GpdFit fit_gpd(const StandardizedReturns& returns, Tail tail) {
    GpdFit fit;
    fit.tail = tail;
    fit.u = select_threshold(returns, tail);
    const auto excess = exceedances(returns.values, fit.u, tail);
    fit.n = returns.values.size();
    fit.n_u = excess.size();
    const auto est = gpd_mle(excess);
    fit.xi = est.xi;
    fit.beta = est.beta;
    return fit;
}

double evt_quantile(const GpdFit& fit, double p0) {
    if (!(p0 > 0.0 && p0 < 1.0)) fail(ErrorCode::InvalidParameter, "p0 must lie in (0,1)");
    if (!(fit.beta > 0.0) || fit.n_u == 0 || fit.n_u > fit.n) fail(ErrorCode::InvalidParameter, "invalid GPD fit");
    const double ratio = p0 * static_cast<double>(fit.n) / static_cast<double>(fit.n_u);
    if (ratio > 1.0 + 1e-12) {
        fail(ErrorCode::QuantileNotInTail, "p0 exceeds the exceedance rate n_u/n; quantile lies below the threshold");
    }
    const double log_ratio = ratio >= 1.0 ? 0.0 : std::log(ratio);
    if (std::abs(fit.xi) < kXiZeroBand) return fit.u - fit.beta * log_ratio;
    return fit.u + fit.beta / fit.xi * std::expm1(-fit.xi * log_ratio);
}

}  // namespace volvar
