#pragma once

#include "volvar/calendar.hpp"

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace volvar {

struct IntradayBar {
    Timestamp timestamp;
    double price = 0.0;   // index points, > 0
    double volume = 0.0;  // >= 0
};

struct TradingDay {
    Date date;
    std::vector<IntradayBar> bars;

    double close() const { return bars.back().price; }
};

// Close-to-close log returns, dated by the later day.
struct ReturnSeries {
    std::vector<Date> dates;
    std::vector<double> values;
};

struct StandardizedReturns {
    std::vector<double> values;
    double mu = 0.0;
    double sigma = 1.0;
};

// Per-day realized measures. rq is empty unless quarticity was computed.
struct RvSeries {
    std::vector<Date> dates;
    std::vector<double> rv;
    std::vector<double> rq;

    std::size_t size() const { return rv.size(); }
    bool has_rq() const { return !rq.empty(); }
};

// CSV with header `timestamp,price,volume`. Rows must be sorted by timestamp;
// errors name the 1-based line number.
std::vector<TradingDay> parse_bars(std::istream& in);
void write_bars(std::ostream& out, std::span<const TradingDay> days);

std::vector<double> intraday_log_returns(const TradingDay& day);
double realized_volatility(const TradingDay& day);
// (N/3) * sum r^4 over the N intraday log returns.
double realized_quarticity(const TradingDay& day);
// Realized volatility of log(1 + volume) between consecutive bars.
double volume_realized_volatility(const TradingDay& day);
double volume_realized_quarticity(const TradingDay& day);

ReturnSeries daily_returns(std::span<const TradingDay> days);

StandardizedReturns standardize(std::span<const double> values);
StandardizedReturns standardize(const ReturnSeries& series);
std::vector<double> unstandardize(const StandardizedReturns& z);

// Per-day series built in one pass. Days with fewer than two bars are dropped
// with a warning.
struct DailyPanel {
    std::vector<Date> dates;
    std::vector<double> close;
    std::vector<double> rv_price;
    std::vector<double> rq_price;
    std::vector<double> rv_volume;
    std::vector<double> rq_volume;
    // Close-to-close log return into each day; absent for the first day.
    std::vector<std::optional<double>> ret;

    std::size_t size() const { return dates.size(); }
    RvSeries price_series() const { return {dates, rv_price, rq_price}; }
    RvSeries volume_series() const { return {dates, rv_volume, rq_volume}; }
};

DailyPanel build_daily_panel(std::span<const TradingDay> days);

void write_daily_panel(std::ostream& out, const DailyPanel& panel);
DailyPanel read_daily_panel(std::istream& in);

}  // namespace volvar
