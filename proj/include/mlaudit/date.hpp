#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>

namespace mlaudit {

/// Calendar date at day granularity, ISO-8601, no time zones.
class Date {
public:
    Date() = default;
    Date(int year, unsigned month, unsigned day);

    /// Parse "YYYY-MM-DD"; throws DateError on malformed or impossible dates.
    static Date parse(const std::string& text);

    std::string to_string() const;

    int year() const;
    unsigned month() const;
    unsigned day() const;

    /// Adds calendar years; a Feb 29 anniversary clamps to Feb 28.
    Date add_years(int n) const;
    Date add_days(std::int64_t n) const;

    /// Signed day difference (*this - other).
    std::int64_t days_since(const Date& other) const;

    std::strong_ordering operator<=>(const Date& other) const;
    bool operator==(const Date& other) const;

private:
    explicit Date(std::chrono::year_month_day ymd) : ymd_(ymd) {}

    std::chrono::year_month_day ymd_{};
};

} // namespace mlaudit
