#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace regrid {

using TimePoint = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

inline constexpr double kDaysPerYear = 365.25;
inline constexpr double kSecondsPerYear = kDaysPerYear * 86400.0;
inline constexpr double kMinutesPerYear = kDaysPerYear * 1440.0; // 525 960

enum class TimestampFormat {
    Iso8601,       // 2001-06-14T08:30:00Z, 2001-06-14 08:30, offsets allowed
    MonthDayYear,  // 06-14-2001 08:30 as exported by outage management systems
};

/// Parses a timestamp and normalises it to UTC. Returns nullopt on any
/// malformed or out-of-range field.
std::optional<TimePoint> parse_timestamp(std::string_view text, TimestampFormat format);

/// YYYY-MM-DDTHH:MM:SSZ
std::string format_iso8601(TimePoint t);

constexpr double to_hours(Seconds d) { return static_cast<double>(d.count()) / 3600.0; }
constexpr double to_minutes(Seconds d) { return static_cast<double>(d.count()) / 60.0; }
constexpr double to_years(Seconds d) { return static_cast<double>(d.count()) / kSecondsPerYear; }

} // namespace regrid
