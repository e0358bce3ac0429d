#include "volvar/tails/skewed_t.hpp"

#include "volvar/error.hpp"
#include "volvar/numeric.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace volvar {

namespace {

constexpr double kNuMax = 200.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

double t_log_norm(double nu) {
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi);
}

// Log-likelihood with the nu-dependent constant hoisted out of the loop.
double log_likelihood_raw(double nu, double gamma, double loc, double scale, std::span<const double> sample) {
    if (!(nu > 2.0) || !(gamma > 0.0) || !(scale > 0.0)) return -kInf;
    const double log_const = std::log(2.0 / (gamma + 1.0 / gamma)) + t_log_norm(nu) - std::log(scale);
    const double k = -0.5 * (nu + 1.0);
    CompensatedSum acc;
    for (double y : sample) {
        const double z = (y - loc) / scale;
        const double w = z >= 0.0 ? z / gamma : z * gamma;
        acc.add(k * std::log1p(w * w / nu));
    }
    return static_cast<double>(sample.size()) * log_const + acc.value();
}

}  // namespace

void SkstFit::validate() const {
    if (!(nu > 2.0) || !(gamma > 0.0) || !(scale > 0.0) || !std::isfinite(loc)) {
        fail(ErrorCode::InvalidParameter, "skewed-t needs nu > 2, gamma > 0, scale > 0");
    }
}

double skst_log_pdf(const SkstFit& fit, double x) {
    fit.validate();
    return log_likelihood_raw(fit.nu, fit.gamma, fit.loc, fit.scale, std::span<const double>(&x, 1));
}

double skst_pdf(const SkstFit& fit, double x) { return std::exp(skst_log_pdf(fit, x)); }

double skst_cdf(const SkstFit& fit, double x) {
    fit.validate();
    const boost::math::students_t_distribution<double> t(fit.nu);
    const double g2 = fit.gamma * fit.gamma;
    const double z = (x - fit.loc) / fit.scale;
    if (z < 0.0) return 2.0 / (g2 + 1.0) * boost::math::cdf(t, fit.gamma * z);
    return 1.0 / (1.0 + g2) + 2.0 * g2 / (1.0 + g2) * (boost::math::cdf(t, z / fit.gamma) - 0.5);
}

double skst_quantile(const SkstFit& fit, double p) {
    fit.validate();
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidParameter, "quantile probability must lie in (0,1)");
    const boost::math::students_t_distribution<double> t(fit.nu);
    const double g2 = fit.gamma * fit.gamma;
    const double p_mode = 1.0 / (1.0 + g2);
    double z;
    if (p < p_mode) {
        z = boost::math::quantile(t, p * (1.0 + g2) / 2.0) / fit.gamma;
    } else {
        z = fit.gamma * boost::math::quantile(t, 0.5 + (p - p_mode) * (1.0 + g2) / (2.0 * g2));
    }
    return fit.loc + fit.scale * z;
}

double skst_log_likelihood(const SkstFit& fit, std::span<const double> sample) {
    return log_likelihood_raw(fit.nu, fit.gamma, fit.loc, fit.scale, sample);
}

SkstFit symmetric_t_fit(std::span<const double> sample, double nu, double loc0, double scale0) {
    auto objective = [&](std::span<const double> x) {
        return -log_likelihood_raw(nu, 1.0, x[0], std::exp(x[1]), sample);
    };
    NelderMeadOptions opts;
    opts.initial_step = 0.05;
    opts.tolerance = 1e-12;
    opts.max_evaluations = 2000;
    const auto res = nelder_mead(objective, {loc0, std::log(scale0)}, opts);
    SkstFit fit{nu, 1.0, res.x[0], std::exp(res.x[1]), -res.value};
    return fit;
}

SkstFit skst_fit(std::span<const double> sample) {
    if (sample.size() < 100) fail(ErrorCode::TooFewObservations, "skewed-t fit needs at least 100 observations");

    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double sd = sample_std(sample);
    if (!(sd > 0.0)) fail(ErrorCode::ZeroVariance, "skewed-t fit of a constant series");

    // Parameters: log(nu - 2), log(gamma), loc, log(scale).
    auto objective = [&](std::span<const double> x) {
        const double nu = 2.0 + std::exp(x[0]);
        if (nu > kNuMax) return kInf;
        return -log_likelihood_raw(nu, std::exp(x[1]), x[2], std::exp(x[3]), sample);
    };
    NelderMeadOptions opts;
    opts.initial_step = 0.1;
    opts.tolerance = 1e-12;
    opts.max_evaluations = 4000;

    const double nu0 = 6.0;
    const SkstFit start = symmetric_t_fit(sample, nu0, median, sd * std::sqrt((nu0 - 2.0) / nu0));
    std::vector<double> x0{std::log(nu0 - 2.0), 0.0, start.loc, std::log(start.scale)};

    SkstFit fit;
    for (int round = 0; round < 3; ++round) {
        auto res = nelder_mead(objective, x0, opts);
        // A restart from the optimum shakes the simplex loose from flat ridges.
        res = nelder_mead(objective, res.x, opts);
        if (!std::isfinite(res.value)) fail(ErrorCode::NonConvergence, "skewed-t likelihood not finite");
        fit = SkstFit{2.0 + std::exp(res.x[0]), std::exp(res.x[1]), res.x[2], std::exp(res.x[3]), -res.value};

        const SkstFit nested = symmetric_t_fit(sample, fit.nu, fit.loc, fit.scale);
        if (fit.log_likelihood >= nested.log_likelihood) return fit;
        x0 = {std::log(fit.nu - 2.0), 0.0, nested.loc, std::log(nested.scale)};
    }
    fail(ErrorCode::NonConvergence, "skewed-t fit did not dominate the nested symmetric fit");
}

SkstFit skst_fit(const StandardizedReturns& returns) { return skst_fit(returns.values); }

}  // namespace volvar
