#include "volvar/calendar.hpp"

#include "volvar/error.hpp"

#include <charconv>
#include <cstdio>

namespace volvar {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::NonPositivePrice: return "NonPositivePrice";
        case ErrorCode::OutOfOrderTimestamp: return "OutOfOrderTimestamp";
        case ErrorCode::TooFewBars: return "TooFewBars";
        case ErrorCode::EmptyDay: return "EmptyDay";
        case ErrorCode::TooFewObservations: return "TooFewObservations";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::Divergence: return "Divergence";
        case ErrorCode::SingularDesign: return "SingularDesign";
        case ErrorCode::WindowTooShort: return "WindowTooShort";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::NoFiniteLikelihood: return "NoFiniteLikelihood";
        case ErrorCode::InsufficientExceedances: return "InsufficientExceedances";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::OutsideSupport: return "OutsideSupport";
        case ErrorCode::QuantileNotInTail: return "QuantileNotInTail";
        case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
        case ErrorCode::DateMisalignment: return "DateMisalignment";
        case ErrorCode::DegenerateSeries: return "DegenerateSeries";
        case ErrorCode::InvalidSplit: return "InvalidSplit";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::MissingArtifact: return "MissingArtifact";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

namespace {

int parse_fixed_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    int value = 0;
    const char* first = text.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        fail(ErrorCode::InvalidParameter, "bad date/time field in '" + std::string(whole) + "'");
    }
    return value;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        fail(ErrorCode::InvalidParameter, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
    }
    const int y = parse_fixed_int(text, 0, 4, text);
    const int m = parse_fixed_int(text, 5, 2, text);
    const int d = parse_fixed_int(text, 8, 2, text);
    Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
              std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) {
        fail(ErrorCode::InvalidParameter, "invalid calendar date '" + std::string(text) + "'");
    }
    return date;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

Timestamp parse_timestamp(std::string_view text) {
    if (text.size() != 16 || text[10] != 'T' || text[13] != ':') {
        fail(ErrorCode::InvalidParameter, "expected YYYY-MM-DDTHH:MM, got '" + std::string(text) + "'");
    }
    Timestamp ts;
    ts.date = parse_date(text.substr(0, 10));
    const int hh = parse_fixed_int(text, 11, 2, text);
    const int mm = parse_fixed_int(text, 14, 2, text);
    if (hh > 23 || mm > 59) {
        fail(ErrorCode::InvalidParameter, "invalid time of day in '" + std::string(text) + "'");
    }
    ts.minute_of_day = hh * 60 + mm;
    return ts;
}

std::string format_timestamp(const Timestamp& ts) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%02d:%02d", ts.minute_of_day / 60, ts.minute_of_day % 60);
    return format_date(ts.date) + "T" + buf;
}

Date add_days(const Date& date, int days) {
    return Date{std::chrono::sys_days{date} + std::chrono::days{days}};
}

bool is_weekend(const Date& date) {
    const std::chrono::weekday wd{std::chrono::sys_days{date}};
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

}  // namespace volvar
