#include "mlaudit/date.hpp"

#include "mlaudit/error.hpp"

#include <cstdio>

namespace mlaudit {

namespace chr = std::chrono;

Date::Date(int year, unsigned month, unsigned day)
    : ymd_(chr::year{year}, chr::month{month}, chr::day{day}) {
    if (!ymd_.ok()) {
        throw DateError("invalid date: " + to_string());
    }
}

Date Date::parse(const std::string& text) {
    int y = 0;
    unsigned m = 0, d = 0;
    char trailing = 0;
    int n = std::sscanf(text.c_str(), "%d-%u-%u%c", &y, &m, &d, &trailing);
    if (n != 3 || text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw DateError("expected ISO date YYYY-MM-DD, got '" + text + "'");
    }
    return Date(y, m, d);
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd_.year()),
                  unsigned(ymd_.month()), unsigned(ymd_.day()));
    return buf;
}

int Date::year() const { return int(ymd_.year()); }
unsigned Date::month() const { return unsigned(ymd_.month()); }
unsigned Date::day() const { return unsigned(ymd_.day()); }

Date Date::add_years(int n) const {
    chr::year_month_day shifted = ymd_ + chr::years{n};
    if (!shifted.ok()) {
        // Only day overflow can occur here (Feb 29 on a non-leap year).
        shifted = shifted.year() / shifted.month() / chr::last;
    }
    return Date(shifted);
}

Date Date::add_days(std::int64_t n) const {
    chr::sys_days sd{ymd_};
    return Date(chr::year_month_day{sd + chr::days{n}});
}

std::int64_t Date::days_since(const Date& other) const {
    return (chr::sys_days{ymd_} - chr::sys_days{other.ymd_}).count();
}

std::strong_ordering Date::operator<=>(const Date& other) const {
    return chr::sys_days{ymd_} <=> chr::sys_days{other.ymd_};
}

bool Date::operator==(const Date& other) const {
    return ymd_ == other.ymd_;
}

} // namespace mlaudit
