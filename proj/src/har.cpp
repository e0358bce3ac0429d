#include "volvar/har.hpp"

#include "volvar/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <string>

namespace volvar {

std::string_view to_string(HarVariant variant) {
    switch (variant) {
        case HarVariant::Har: return "HAR";
        case HarVariant::Harq: return "HARQ";
        case HarVariant::Harqf: return "HARQF";
    }
    return "HAR";
}

void HarCoefficients::validate() const {
    const bool want_dq = variant != HarVariant::Har;
    const bool want_wmq = variant == HarVariant::Harqf;
    if (beta_dq.has_value() != want_dq || beta_wq.has_value() != want_wmq || beta_mq.has_value() != want_wmq) {
        fail(ErrorCode::InvalidParameter,
             "coefficient set does not match variant " + std::string(to_string(variant)));
    }
}

namespace {

double tail_mean(std::span<const double> window, std::size_t len) {
    const auto tail = window.last(len);
    return std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(len);
}

std::size_t column_count(HarVariant v) {
    switch (v) {
        case HarVariant::Har: return 4;
        case HarVariant::Harq: return 5;
        case HarVariant::Harqf: return 7;
    }
    return 4;
}

}  // namespace

HarRegressors har_regressors(std::span<const double> rv_window, std::span<const double> rq_window) {
    if (rv_window.size() < kHarMonth) {
        fail(ErrorCode::WindowTooShort, "HAR window needs " + std::to_string(kHarMonth) + " values, got " +
                                            std::to_string(rv_window.size()));
    }
    HarRegressors r;
    r.daily = rv_window.back();
    r.weekly = tail_mean(rv_window, kHarWeek);
    r.monthly = tail_mean(rv_window, kHarMonth);
    if (!rq_window.empty()) {
        if (rq_window.size() < kHarMonth) fail(ErrorCode::WindowTooShort, "RQ window shorter than 22");
        r.daily_q = std::sqrt(rq_window.back()) * r.daily;
        r.weekly_q = std::sqrt(tail_mean(rq_window, kHarWeek)) * r.weekly;
        r.monthly_q = std::sqrt(tail_mean(rq_window, kHarMonth)) * r.monthly;
    }
    return r;
}

HarCoefficients har_fit(const RvSeries& rv, HarVariant variant) {
    const std::size_t n = rv.size();
    if (n < kHarMonth + 30) {
        fail(ErrorCode::TooFewObservations, "HAR fit needs at least 52 observations, got " + std::to_string(n));
    }
    const bool quarticity = variant != HarVariant::Har;
    if (quarticity && rv.rq.size() != n) {
        fail(ErrorCode::InvalidParameter, std::string(to_string(variant)) + " requires realized quarticity");
    }

    const std::size_t rows = n - kHarMonth;  // t = 21 .. n-2 predicts t+1
    const std::size_t cols = column_count(variant);
    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd y(rows);
    const std::span<const double> rv_all(rv.rv);
    const std::span<const double> rq_all(rv.rq);
    for (std::size_t row = 0; row < rows; ++row) {
        const std::size_t t = row + kHarMonth - 1;
        const auto reg = har_regressors(rv_all.subspan(t + 1 - kHarMonth, kHarMonth),
                                        quarticity ? rq_all.subspan(t + 1 - kHarMonth, kHarMonth)
                                                   : std::span<const double>{});
        const auto r = static_cast<Eigen::Index>(row);
        X(r, 0) = 1.0;
        X(r, 1) = reg.daily;
        X(r, 2) = reg.weekly;
        X(r, 3) = reg.monthly;
        if (variant != HarVariant::Har) X(r, 4) = reg.daily_q;
        if (variant == HarVariant::Harqf) {
            X(r, 5) = reg.weekly_q;
            X(r, 6) = reg.monthly_q;
        }
        y(r) = rv.rv[t + 1];
    }

    // The core HAR block must have full rank; an all-zero quarticity column is
    // tolerated and resolved by the minimum-norm solution below.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> core(X.leftCols(4));
    core.setThreshold(1e-10);
    if (core.rank() < 4) fail(ErrorCode::SingularDesign, "HAR design matrix is rank deficient");

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
    cod.setThreshold(1e-10);
    const Eigen::VectorXd beta = cod.solve(y);

    HarCoefficients c;
    c.variant = variant;
    c.beta0 = beta(0);
    c.beta_d = beta(1);
    c.beta_w = beta(2);
    c.beta_m = beta(3);
    if (variant != HarVariant::Har) c.beta_dq = beta(4);
    if (variant == HarVariant::Harqf) {
        c.beta_wq = beta(5);
        c.beta_mq = beta(6);
    }
    return c;
}

double har_forecast(const HarCoefficients& coefs, std::span<const double> rv_window,
                    std::span<const double> rq_window) {
    coefs.validate();
    const bool quarticity = coefs.variant != HarVariant::Har;
    if (quarticity && rq_window.size() < kHarMonth) {
        fail(ErrorCode::WindowTooShort, "quarticity window needs 22 values");
    }
    const auto reg = har_regressors(rv_window, quarticity ? rq_window : std::span<const double>{});
    double f = coefs.beta0 + coefs.beta_d * reg.daily + coefs.beta_w * reg.weekly + coefs.beta_m * reg.monthly;
    if (quarticity && !(rq_window.back() < rv_window.back())) {
        f += *coefs.beta_dq * reg.daily_q;
        if (coefs.variant == HarVariant::Harqf) f += *coefs.beta_wq * reg.weekly_q + *coefs.beta_mq * reg.monthly_q;
    }
    return std::max(f, kVarianceFloor);
}

}  // namespace volvar
