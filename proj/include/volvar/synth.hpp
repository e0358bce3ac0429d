#pragma once

#include "volvar/marketdata.hpp"

#include <cstdint>
#include <vector>

namespace volvar {

// Intraday bars driven by a HAR recursion on log daily variance. Each day's
// close-to-close return is sigma_t * eps_t with eps_t a unit-variance Student-t
// of tail index xi (nu = 1/xi; xi = 0 gives Gaussian shocks). The intraday path
// is a Gaussian bridge that sums exactly to that return.
struct SynthConfig {
    int days = 2000;
    int bars_per_day = 48;
    double xi = 0.2;
    std::uint64_t seed = 7;
    double daily_vol = 0.01;  // long-run level of sigma_t
    double har_daily = 0.35;
    double har_weekly = 0.35;
    double har_monthly = 0.20;
    double vol_of_vol = 0.25;
    double start_price = 1000.0;
    double base_volume = 5000.0;
    Date start_date{std::chrono::year{2000}, std::chrono::January, std::chrono::day{4}};

    void validate() const;
};

std::vector<TradingDay> generate_synthetic(const SynthConfig& config);

}  // namespace volvar
