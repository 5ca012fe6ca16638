#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace lapsekit {

/// Proleptic Gregorian calendar date. Stored in tables as a day number
/// (days since 1970-01-01) inside numeric columns; this struct is the
/// human-facing form used for parsing, formatting and calendar arithmetic.
struct Date {
    int year = 1970;
    int month = 1; // 1..12
    int day = 1;   // 1..31

    friend bool operator==(const Date&, const Date&) = default;
};

bool is_valid_date(const Date& d);
int days_in_month(int year, int month);

/// Days since 1970-01-01 (negative before). Howard Hinnant's civil algorithm.
std::int64_t day_number(const Date& d);
Date date_from_day_number(std::int64_t days);

/// Calendar shift by whole months; day-of-month clamped to the target month
/// (2000-01-31 + 1 month -> 2000-02-29).
Date add_months(const Date& d, int months);
Date add_years(const Date& d, int years);

/// Parses strict ISO "YYYY-MM-DD".
Date parse_date(std::string_view text);
std::string format_date(const Date& d);

/// Duration in years between two day numbers under the actual/365.25 convention.
inline double years_between(std::int64_t from_day, std::int64_t to_day) {
    return static_cast<double>(to_day - from_day) / 365.25;
}

} // namespace lapsekit
