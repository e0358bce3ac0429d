#pragma once

#include "volvar/marketdata.hpp"

#include <span>

namespace volvar {

// Fernandez-Steel skewed Student-t: a standard t(nu) density scaled by gamma
// to the right of the mode and by 1/gamma to the left. gamma = 1 is the
// symmetric t; gamma > 1 skews right.
struct SkstFit {
    double nu = 5.0;
    double gamma = 1.0;
    double loc = 0.0;
    double scale = 1.0;
    double log_likelihood = 0.0;

    void validate() const;
};

double skst_pdf(const SkstFit& fit, double x);
double skst_log_pdf(const SkstFit& fit, double x);
double skst_cdf(const SkstFit& fit, double x);
// Closed-form piecewise inverse of skst_cdf.
double skst_quantile(const SkstFit& fit, double p);
double skst_log_likelihood(const SkstFit& fit, std::span<const double> sample);

// Maximum likelihood over (nu, gamma, loc, scale), nu in (2, 200]. The result
// never has a lower likelihood than the symmetric t fitted at the same nu.
SkstFit skst_fit(const StandardizedReturns& returns);
SkstFit skst_fit(std::span<const double> sample);

// ML over (loc, scale) with nu fixed and gamma = 1.
SkstFit symmetric_t_fit(std::span<const double> sample, double nu, double loc0, double scale0);

}  // namespace volvar
