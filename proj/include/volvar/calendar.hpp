#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace volvar {

using Date = std::chrono::year_month_day;

// Exchange-local minute-resolution timestamp. No timezone arithmetic.
struct Timestamp {
    Date date;
    int minute_of_day = 0;

    auto operator<=>(const Timestamp&) const = default;
};

// "YYYY-MM-DD"; throws Error(InvalidParameter) on bad input.
Date parse_date(std::string_view text);
std::string format_date(const Date& date);

// "YYYY-MM-DDTHH:MM"
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(const Timestamp& ts);

Date add_days(const Date& date, int days);
bool is_weekend(const Date& date);

}  // namespace volvar
