#include "ransomrisk/core/date.hpp"

#include <charconv>
#include <cstdio>

#include "ransomrisk/core/error.hpp"

namespace ransomrisk {

namespace {

bool parse_fixed_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

}  // namespace

bool is_valid_date(int year, int month, int day) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (year < 1 || year > 9999 || month < 1 || month > 12 || day < 1) return false;
    int limit = kDays[month - 1] + (month == 2 && is_leap(year) ? 1 : 0);
    return day <= limit;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

YearMonth YearMonth::from_index(long idx) {
    long y = idx >= 0 ? idx / 12 : -((-idx + 11) / 12);
    long m = idx - y * 12;
    return {static_cast<int>(y), static_cast<int>(m) + 1};
}

std::string YearMonth::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() < 10) return std::nullopt;
    if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return std::nullopt;
    if (text[4] != '-' || text[7] != '-') return std::nullopt;
    Date d;
    if (!parse_fixed_int(text.substr(0, 4), d.year) || !parse_fixed_int(text.substr(5, 2), d.month) ||
        !parse_fixed_int(text.substr(8, 2), d.day))
        return std::nullopt;
    if (!is_valid_date(d.year, d.month, d.day)) return std::nullopt;
    return d;
}

Date parse_date_or_throw(std::string_view text) {
    auto d = parse_date(text);
    if (!d) throw Error("InvalidDate", "cannot parse date '" + std::string(text) + "'");
    return *d;
}

std::optional<YearMonth> parse_year_month(std::string_view text) {
    if (text.size() != 7 || text[4] != '-') return std::nullopt;
    YearMonth ym;
    if (!parse_fixed_int(text.substr(0, 4), ym.year) || !parse_fixed_int(text.substr(5, 2), ym.month))
        return std::nullopt;
    if (ym.year < 1 || ym.month < 1 || ym.month > 12) return std::nullopt;
    return ym;
}

YearMonth parse_year_month_or_throw(std::string_view text) {
    auto ym = parse_year_month(text);
    if (!ym) throw Error("InvalidMonth", "cannot parse year-month '" + std::string(text) + "'");
    return *ym;
}

}  // namespace ransomrisk
