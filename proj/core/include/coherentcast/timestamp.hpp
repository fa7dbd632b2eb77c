#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace coherentcast {

/// Timezone-naive local wall-clock time at minute resolution.
using Timestamp = std::chrono::sys_time<std::chrono::minutes>;
using Date = std::chrono::sys_days;

/// Parses "YYYY-MM-DDTHH:MM", optionally with ":SS" and a space instead of 'T'.
/// Seconds must be zero. Returns nullopt on malformed text.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::optional<Date> parse_date(std::string_view text);

/// "YYYY-MM-DDTHH:MM"
std::string format_timestamp(Timestamp t);
std::string format_date(Date d);

Timestamp floor_hour(Timestamp t);
Timestamp ceil_hour(Timestamp t);
bool on_hour(Timestamp t);

int hour_of_day(Timestamp t);
/// Hours elapsed since January 1st 00:00 of the same year.
int hour_of_year(Timestamp t);
/// True Monday through Friday.
bool is_weekday(Timestamp t);
Date date_of(Timestamp t);

}  // namespace coherentcast
