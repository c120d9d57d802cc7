#include "resmpc/timeutil.hpp"

#include <array>
#include <chrono>
#include <cstdio>

#include "resmpc/errors.hpp"

namespace resmpc {

namespace {

namespace chr = std::chrono;

chr::year_month_day civil_from(Timestamp t) {
    const auto days = chr::sys_days(chr::days(
        static_cast<std::int64_t>(t.hours_since_epoch() >= 0
                                      ? t.hours_since_epoch() / 24
                                      : (t.hours_since_epoch() - 23) / 24)));
    return chr::year_month_day(days);
}

// Cumulative days before each month in a non-leap year.
constexpr std::array<int, 12> kCumDays = {0,   31,  59,  90,  120, 151,
                                          181, 212, 243, 273, 304, 334};
constexpr std::array<int, 12> kMonthDays = {31, 28, 31, 30, 31, 30,
                                            31, 31, 30, 31, 30, 31};

}  // namespace

Timestamp make_timestamp(int year, int month, int day, int hour) {
    const chr::year_month_day ymd{chr::year(year), chr::month(unsigned(month)),
                                  chr::day(unsigned(day))};
    if (!ymd.ok())
        fail(ErrorKind::InvalidInput, "invalid calendar date");
    if (hour < 0 || hour > 23)
        fail(ErrorKind::InvalidInput, "hour out of range");
    const auto days = chr::sys_days(ymd).time_since_epoch().count();
    return Timestamp(static_cast<std::int64_t>(days) * 24 + hour);
}

Timestamp parse_timestamp(std::string_view text) {
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    char sep = 0;
    std::string buf(text);
    int consumed = 0;
    int n = std::sscanf(buf.c_str(), "%d-%d-%d%c%d:%d:%d%n", &year, &month,
                        &day, &sep, &hour, &minute, &second, &consumed);
    if (n != 7) {
        // Retry without seconds.
        consumed = 0;
        second = 0;
        n = std::sscanf(buf.c_str(), "%d-%d-%d%c%d:%d%n", &year, &month, &day,
                        &sep, &hour, &minute, &consumed);
        if (n != 6)
            fail(ErrorKind::Parse, "unparseable timestamp '" + buf + "'");
    }
    if (sep != 'T' && sep != ' ')
        fail(ErrorKind::Parse, "unparseable timestamp '" + buf + "'");
    std::string_view rest = text.substr(size_t(consumed));
    if (!rest.empty() && rest != "Z")
        fail(ErrorKind::Parse, "unparseable timestamp '" + buf + "'");
    if (minute != 0 || second != 0)
        fail(ErrorKind::Validation,
             "timestamp '" + buf + "' is not hour-aligned");
    return make_timestamp(year, month, day, hour);
}

std::string format_timestamp(Timestamp t) {
    const auto ymd = civil_from(t);
    char out[32];
    std::snprintf(out, sizeof out, "%04d-%02u-%02uT%02d:00:00Z",
                  int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                  hour_of_day(t));
    return out;
}

int day_of_year_365(Timestamp t) {
    const auto ymd = civil_from(t);
    const int m = int(unsigned(ymd.month()));
    int d = int(unsigned(ymd.day()));
    if (d > kMonthDays[size_t(m - 1)])
        d = kMonthDays[size_t(m - 1)];  // Feb 29 -> Feb 28 slot
    return kCumDays[size_t(m - 1)] + d - 1;
}

int hour_of_year(Timestamp t) {
    return day_of_year_365(t) * 24 + hour_of_day(t);
}

int hour_of_day(Timestamp t) {
    const std::int64_t h = t.hours_since_epoch() % 24;
    return int(h < 0 ? h + 24 : h);
}

int month_of(Timestamp t) {
    return int(unsigned(civil_from(t).month()));
}

}  // namespace resmpc
