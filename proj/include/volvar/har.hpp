#pragma once

#include "volvar/marketdata.hpp"

#include <optional>
#include <span>
#include <string_view>

namespace volvar {

enum class HarVariant { Har, Harq, Harqf };

std::string_view to_string(HarVariant variant);

struct HarCoefficients {
    HarVariant variant = HarVariant::Har;
    double beta0 = 0.0;
    double beta_d = 0.0;
    double beta_w = 0.0;
    double beta_m = 0.0;
    // Quarticity interactions: daily for HARQ; daily, weekly and monthly for HARQF.
    std::optional<double> beta_dq;
    std::optional<double> beta_wq;
    std::optional<double> beta_mq;

    // Throws InvalidParameter when the optional terms do not match the variant.
    void validate() const;
};

inline constexpr std::size_t kHarWeek = 5;
inline constexpr std::size_t kHarMonth = 22;
inline constexpr double kVarianceFloor = 1e-12;

// Regressors observed at the last element of the window.
struct HarRegressors {
    double daily = 0.0;
    double weekly = 0.0;
    double monthly = 0.0;
    double daily_q = 0.0;    // sqrt(RQ_t) * RV_t
    double weekly_q = 0.0;   // sqrt(mean RQ over 5 days) * weekly RV
    double monthly_q = 0.0;  // sqrt(mean RQ over 22 days) * monthly RV
};

// Windows end at day t (most recent last) and hold at least 22 values; rq may
// be empty when no quarticity terms are needed.
HarRegressors har_regressors(std::span<const double> rv_window, std::span<const double> rq_window);

// OLS of RV_{t+1} on the regressors at t over every t with a full month of
// history. Needs at least 52 observations; rq is required for HARQ/HARQF.
HarCoefficients har_fit(const RvSeries& rv, HarVariant variant);

// Plug-in forecast floored at kVarianceFloor. For HARQ/HARQF the quarticity
// terms are dropped on days where RQ_t < RV_t.
double har_forecast(const HarCoefficients& coefs, std::span<const double> rv_window,
                    std::span<const double> rq_window);

}  // namespace volvar
