#include "coherentcast/timestamp.hpp"

#include <charconv>
#include <cstdio>

namespace coherentcast {

using namespace std::chrono;

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) return false;
    const char* first = text.data() + pos;
    const char* last = first + len;
    for (const char* p = first; p != last; ++p) {
        if (*p < '0' || *p > '9') return false;
    }
    return std::from_chars(first, last, out).ec == std::errc{};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d)) return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    text = trim(text);
    if (text.size() != 16 && text.size() != 19) return std::nullopt;
    const auto date = parse_date(text.substr(0, 10));
    if (!date || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (!read_int(text, 11, 2, hh) || !read_int(text, 14, 2, mm)) return std::nullopt;
    if (text.size() == 19) {
        if (text[16] != ':' || !read_int(text, 17, 2, ss) || ss != 0) return std::nullopt;
    }
    if (hh > 23 || mm > 59) return std::nullopt;
    return Timestamp{*date} + hours{hh} + minutes{mm};
}

std::string format_date(Date d) {
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_timestamp(Timestamp t) {
    const auto day = floor<days>(t);
    const hh_mm_ss tod{t - day};
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d:%02d", static_cast<int>(tod.hours().count()),
                  static_cast<int>(tod.minutes().count()));
    return format_date(day) + "T" + buf;
}

Timestamp floor_hour(Timestamp t) { return floor<hours>(t); }

Timestamp ceil_hour(Timestamp t) { return ceil<hours>(t); }

bool on_hour(Timestamp t) { return floor_hour(t) == t; }

int hour_of_day(Timestamp t) {
    const auto day = floor<days>(t);
    return static_cast<int>(duration_cast<hours>(t - day).count());
}

int hour_of_year(Timestamp t) {
    const year_month_day ymd{floor<days>(t)};
    const sys_days jan1{ymd.year() / January / 1};
    return static_cast<int>(duration_cast<hours>(t - Timestamp{jan1}).count());
}

bool is_weekday(Timestamp t) {
    const weekday wd{floor<days>(t)};
    return wd != Saturday && wd != Sunday;
}

Date date_of(Timestamp t) { return floor<days>(t); }

}  // namespace coherentcast
