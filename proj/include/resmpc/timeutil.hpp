#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace resmpc {

/// Hour-aligned UTC instant stored as whole hours since the Unix epoch.
/// All series in this project are hourly, so an integer hour count is the
/// natural (and exactly comparable) representation.
class Timestamp {
public:
    Timestamp() = default;
    explicit constexpr Timestamp(std::int64_t hours_since_epoch)
        : hours_(hours_since_epoch) {}

    constexpr std::int64_t hours_since_epoch() const { return hours_; }

    constexpr Timestamp operator+(std::int64_t hours) const { return Timestamp(hours_ + hours); }
    constexpr Timestamp operator-(std::int64_t hours) const { return Timestamp(hours_ - hours); }
    constexpr std::int64_t operator-(Timestamp other) const { return hours_ - other.hours_; }
    Timestamp& operator+=(std::int64_t hours) { hours_ += hours; return *this; }

    constexpr auto operator<=>(const Timestamp&) const = default;

private:
    std::int64_t hours_ = 0;
};

/// Builds an hour-aligned timestamp from calendar fields (UTC).
Timestamp make_timestamp(int year, int month, int day, int hour = 0);

/// Parses "YYYY-MM-DDTHH:MM:SSZ" (seconds and the trailing 'Z' optional,
/// ' ' accepted in place of 'T'). Rejects instants that are not hour-aligned.
Timestamp parse_timestamp(std::string_view text);

std::string format_timestamp(Timestamp t);

/// Day-of-year index into a fixed 365-slot calendar, 0-based.
/// Feb 29 folds into Feb 28's slot (1-based day 59), keeping climatology and
/// demand profiles leap-free.
int day_of_year_365(Timestamp t);

/// Hour-of-year in [0, 8760), consistent with day_of_year_365.
int hour_of_year(Timestamp t);

int hour_of_day(Timestamp t);

/// Calendar month in [1, 12].
int month_of(Timestamp t);

}  // namespace resmpc
