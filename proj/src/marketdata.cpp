#include "volvar/marketdata.hpp"

#include "volvar/error.hpp"
#include "volvar/numeric.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace volvar {

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string_view chomp(std::string_view line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
    return line;
}

bool parse_double(std::string_view text, double& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = first + text.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

std::string line_msg(std::size_t line_no, std::string_view what) {
    return "line " + std::to_string(line_no) + ": " + std::string(what);
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void require_bars(const TradingDay& day) {
    if (day.bars.size() < 2) {
        fail(ErrorCode::TooFewBars, "day " + format_date(day.date) + " has " +
                                        std::to_string(day.bars.size()) + " bar(s); need at least 2");
    }
}

}  // namespace

std::vector<TradingDay> parse_bars(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) fail(ErrorCode::MalformedRow, "empty input; expected header");
    ++line_no;
    if (chomp(line) != "timestamp,price,volume") {
        fail(ErrorCode::MalformedRow, line_msg(line_no, "expected header 'timestamp,price,volume'"));
    }

    std::vector<TradingDay> days;
    std::optional<Timestamp> previous;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = chomp(line);
        if (text.empty()) continue;
        const auto fields = split_csv(text);
        if (fields.size() != 3) fail(ErrorCode::MalformedRow, line_msg(line_no, "expected 3 fields"));

        IntradayBar bar;
        try {
            bar.timestamp = parse_timestamp(fields[0]);
        } catch (const Error& e) {
            fail(ErrorCode::MalformedRow, line_msg(line_no, e.message()));
        }
        if (!parse_double(fields[1], bar.price)) fail(ErrorCode::MalformedRow, line_msg(line_no, "bad price"));
        if (!parse_double(fields[2], bar.volume)) fail(ErrorCode::MalformedRow, line_msg(line_no, "bad volume"));
        if (bar.price <= 0.0) fail(ErrorCode::NonPositivePrice, line_msg(line_no, "price must be > 0"));
        if (bar.volume < 0.0) fail(ErrorCode::MalformedRow, line_msg(line_no, "volume must be >= 0"));
        if (previous && !(*previous < bar.timestamp)) {
            fail(ErrorCode::OutOfOrderTimestamp, line_msg(line_no, "timestamps must be strictly increasing"));
        }
        previous = bar.timestamp;

        if (days.empty() || days.back().date != bar.timestamp.date) {
            days.push_back(TradingDay{bar.timestamp.date, {}});
        }
        days.back().bars.push_back(bar);
    }
    return days;
}

void write_bars(std::ostream& out, std::span<const TradingDay> days) {
    out << "timestamp,price,volume\n";
    for (const auto& day : days) {
        for (const auto& bar : day.bars) {
            out << format_timestamp(bar.timestamp) << ',' << fmt17(bar.price) << ',' << fmt17(bar.volume) << '\n';
        }
    }
}

std::vector<double> intraday_log_returns(const TradingDay& day) {
    require_bars(day);
    std::vector<double> out;
    out.reserve(day.bars.size() - 1);
    for (std::size_t i = 1; i < day.bars.size(); ++i) {
        out.push_back(std::log(day.bars[i].price / day.bars[i - 1].price));
    }
    return out;
}

double realized_volatility(const TradingDay& day) {
    CompensatedSum sum;
    for (double r : intraday_log_returns(day)) sum.add(r * r);
    return sum.value();
}

double realized_quarticity(const TradingDay& day) {
    const auto returns = intraday_log_returns(day);
    CompensatedSum sum;
    for (double r : returns) sum.add((r * r) * (r * r));
    return static_cast<double>(returns.size()) / 3.0 * sum.value();
}

double volume_realized_volatility(const TradingDay& day) {
    require_bars(day);
    CompensatedSum sum;
    for (std::size_t i = 1; i < day.bars.size(); ++i) {
        const double r = std::log1p(day.bars[i].volume) - std::log1p(day.bars[i - 1].volume);
        sum.add(r * r);
    }
    return sum.value();
}

double volume_realized_quarticity(const TradingDay& day) {
    require_bars(day);
    CompensatedSum sum;
    for (std::size_t i = 1; i < day.bars.size(); ++i) {
        const double r = std::log1p(day.bars[i].volume) - std::log1p(day.bars[i - 1].volume);
        sum.add((r * r) * (r * r));
    }
    return static_cast<double>(day.bars.size() - 1) / 3.0 * sum.value();
}

ReturnSeries daily_returns(std::span<const TradingDay> days) {
    if (days.size() < 2) fail(ErrorCode::TooFewObservations, "daily returns need at least 2 days");
    ReturnSeries out;
    for (std::size_t t = 0; t < days.size(); ++t) {
        if (days[t].bars.empty()) fail(ErrorCode::EmptyDay, "day " + format_date(days[t].date) + " has no bars");
        if (t == 0) continue;
        out.dates.push_back(days[t].date);
        out.values.push_back(std::log(days[t].close() / days[t - 1].close()));
    }
    return out;
}

StandardizedReturns standardize(std::span<const double> values) {
    if (values.size() < 2) fail(ErrorCode::TooFewObservations, "standardize needs at least 2 observations");
    StandardizedReturns z;
    z.mu = mean(values);
    z.sigma = sample_std(values);
    if (!(z.sigma > 0.0)) fail(ErrorCode::ZeroVariance, "cannot standardize a constant series");
    z.values.reserve(values.size());
    for (double v : values) z.values.push_back((v - z.mu) / z.sigma);
    return z;
}

StandardizedReturns standardize(const ReturnSeries& series) { return standardize(series.values); }

std::vector<double> unstandardize(const StandardizedReturns& z) {
    std::vector<double> out;
    out.reserve(z.values.size());
    for (double v : z.values) out.push_back(v * z.sigma + z.mu);
    return out;
}

DailyPanel build_daily_panel(std::span<const TradingDay> days) {
    DailyPanel panel;
    for (const auto& day : days) {
        if (day.bars.size() < 2) {
            log_warning("dropping " + format_date(day.date) + ": fewer than 2 bars");
            continue;
        }
        const double close = day.close();
        panel.ret.push_back(panel.close.empty() ? std::optional<double>{}
                                                : std::optional<double>{std::log(close / panel.close.back())});
        panel.dates.push_back(day.date);
        panel.close.push_back(close);
        panel.rv_price.push_back(realized_volatility(day));
        panel.rq_price.push_back(realized_quarticity(day));
        panel.rv_volume.push_back(volume_realized_volatility(day));
        panel.rq_volume.push_back(volume_realized_quarticity(day));
    }
    return panel;
}

void write_daily_panel(std::ostream& out, const DailyPanel& panel) {
    out << "date,close,rv_price,rq_price,rv_volume,rq_volume,return\n";
    for (std::size_t i = 0; i < panel.size(); ++i) {
        out << format_date(panel.dates[i]) << ',' << fmt17(panel.close[i]) << ',' << fmt17(panel.rv_price[i]) << ','
            << fmt17(panel.rq_price[i]) << ',' << fmt17(panel.rv_volume[i]) << ','
            << fmt17(panel.rq_volume[i]) << ',' << (panel.ret[i] ? fmt17(*panel.ret[i]) : std::string{}) << '\n';
    }
}

DailyPanel read_daily_panel(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || chomp(line) != "date,close,rv_price,rq_price,rv_volume,rq_volume,return") {
        fail(ErrorCode::MalformedRow, "daily panel: bad header");
    }
    DailyPanel panel;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = chomp(line);
        if (text.empty()) continue;
        const auto f = split_csv(text);
        if (f.size() != 7) fail(ErrorCode::MalformedRow, line_msg(line_no, "daily panel: expected 7 fields"));
        double close, rv, rq, rvv, rqv;
        if (!parse_double(f[1], close) || !parse_double(f[2], rv) || !parse_double(f[3], rq) ||
            !parse_double(f[4], rvv) || !parse_double(f[5], rqv)) {
            fail(ErrorCode::MalformedRow, line_msg(line_no, "daily panel: bad number"));
        }
        std::optional<double> ret;
        if (!f[6].empty()) {
            double r;
            if (!parse_double(f[6], r)) fail(ErrorCode::MalformedRow, line_msg(line_no, "daily panel: bad return"));
            ret = r;
        }
        panel.dates.push_back(parse_date(f[0]));
        panel.close.push_back(close);
        panel.rv_price.push_back(rv);
        panel.rq_price.push_back(rq);
        panel.rv_volume.push_back(rvv);
        panel.rq_volume.push_back(rqv);
        panel.ret.push_back(ret);
    }
    return panel;
}

}  // namespace volvar
