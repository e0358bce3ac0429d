#include "volvar/synth.hpp"

#include "volvar/error.hpp"

#include <cmath>
#include <deque>
#include <numeric>
#include <random>

namespace volvar {

void SynthConfig::validate() const {
    if (days < 30) fail(ErrorCode::InvalidConfig, "synth: days must be >= 30");
    if (bars_per_day < 2) fail(ErrorCode::InvalidConfig, "synth: bars_per_day must be >= 2");
    if (!(xi >= 0.0 && xi < 0.5)) fail(ErrorCode::InvalidConfig, "synth: xi must lie in [0, 0.5)");
    if (!(daily_vol > 0.0) || !(start_price > 0.0) || !(base_volume > 0.0)) {
        fail(ErrorCode::InvalidConfig, "synth: scales must be positive");
    }
    if (!(har_daily + har_weekly + har_monthly < 1.0)) {
        fail(ErrorCode::InvalidConfig, "synth: HAR persistence must be below 1");
    }
}

std::vector<TradingDay> generate_synthetic(const SynthConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    auto shock = [&]() {
        if (config.xi == 0.0) return normal(rng);
        const double nu = 1.0 / config.xi;
        std::student_t_distribution<double> t(nu);
        return t(rng) * std::sqrt((nu - 2.0) / nu);
    };

    const double level = std::log(config.daily_vol * config.daily_vol);
    const double persistence = config.har_daily + config.har_weekly + config.har_monthly;
    const double intercept = (1.0 - persistence) * level;
    std::deque<double> history(22, level);

    const int m = config.bars_per_day;
    const int open_minute = 9 * 60 + 30;
    const int step_minutes = std::max(1, std::min(5, (24 * 60 - open_minute - 1) / m));

    std::vector<TradingDay> days;
    days.reserve(static_cast<std::size_t>(config.days));
    Date date = config.start_date;
    double price = config.start_price;
    std::vector<double> g(static_cast<std::size_t>(m));

    for (int day = 0; day < config.days; ++day) {
        while (is_weekend(date)) date = add_days(date, 1);

        const double week = std::accumulate(history.end() - 5, history.end(), 0.0) / 5.0;
        const double month = std::accumulate(history.begin(), history.end(), 0.0) / 22.0;
        const double log_var = intercept + config.har_daily * history.back() + config.har_weekly * week +
                               config.har_monthly * month + config.vol_of_vol * normal(rng);
        history.pop_front();
        history.push_back(log_var);
        const double sigma = std::exp(0.5 * log_var);

        const double eps = shock();
        double g_sum = 0.0;
        for (double& v : g) {
            v = normal(rng);
            g_sum += v;
        }
        const double g_mean = g_sum / m;

        TradingDay td{date, {}};
        td.bars.reserve(static_cast<std::size_t>(m) + 1);
        td.bars.push_back({{date, open_minute}, price, config.base_volume * std::exp(0.3 * normal(rng))});
        for (int i = 0; i < m; ++i) {
            const double r = sigma / std::sqrt(static_cast<double>(m)) *
                             (g[static_cast<std::size_t>(i)] - g_mean + eps / std::sqrt(static_cast<double>(m)));
            price *= std::exp(r);
            // Turnover rises with the size of the move.
            const double activity = std::abs(r) / (config.daily_vol / std::sqrt(static_cast<double>(m)));
            const double volume = config.base_volume * std::exp(0.25 * activity + 0.3 * normal(rng));
            td.bars.push_back({{date, open_minute + (i + 1) * step_minutes}, price, std::round(volume)});
        }
        days.push_back(std::move(td));
        date = add_days(date, 1);
    }
    return days;
}

}  // namespace volvar
