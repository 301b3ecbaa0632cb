#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace ransomrisk {

/// Proleptic Gregorian calendar date.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    std::string to_string() const;
};

/// Calendar month, the unit the activity series is bucketed in.
struct YearMonth {
    int year = 1970;
    int month = 1;

    auto operator<=>(const YearMonth&) const = default;

    /// Months since year 0; consecutive months differ by exactly one.
    long index() const { return static_cast<long>(year) * 12 + (month - 1); }
    static YearMonth from_index(long idx);
    static YearMonth of(const Date& d) { return {d.year, d.month}; }

    YearMonth plus(long months) const { return from_index(index() + months); }
    std::string to_string() const;
};

bool is_valid_date(int year, int month, int day);

/// Accepts "YYYY-MM-DD" optionally followed by a time part separated by
/// 'T' or a space ("2023-05-14 10:22:33.000000").
std::optional<Date> parse_date(std::string_view text);
Date parse_date_or_throw(std::string_view text);

/// "YYYY-MM".
std::optional<YearMonth> parse_year_month(std::string_view text);
YearMonth parse_year_month_or_throw(std::string_view text);

}  // namespace ransomrisk
