#include "coherentcast/sessions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include "coherentcast/csv.hpp"
#include "coherentcast/errors.hpp"

namespace coherentcast {

using std::chrono::hours;
using std::chrono::minutes;

TimeSeriesFrame::TimeSeriesFrame(Timestamp start, std::vector<std::string> stations,
                                 std::vector<std::vector<double>> station_series)
    : start_(start), stations_(std::move(stations)), station_series_(std::move(station_series)) {
    if (!on_hour(start_)) throw ContractError("frame start must be on an hour boundary");
    if (stations_.size() != station_series_.size()) throw ContractError("station names and series differ in count");
    const std::size_t len = station_series_.empty() ? 0 : station_series_.front().size();
    total_.assign(len, 0.0);
    for (const auto& s : station_series_) {
        if (s.size() != len) throw ContractError("station series differ in length");
        for (std::size_t t = 0; t < len; ++t) total_[t] += s[t];
    }
}

Timestamp TimeSeriesFrame::timestamp(std::size_t i) const { return start_ + hours{static_cast<long>(i)}; }

std::size_t TimeSeriesFrame::index_of(Timestamp t) const {
    const auto offset = std::chrono::duration_cast<minutes>(t - start_).count();
    if (offset < 0 || offset % 60 != 0 || static_cast<std::size_t>(offset / 60) >= length()) {
        throw ContractError("timestamp " + format_timestamp(t) + " is not an hour of the frame");
    }
    return static_cast<std::size_t>(offset / 60);
}

const std::vector<double>& TimeSeriesFrame::series(std::size_t k) const {
    if (k == 0) return total_;
    return station_series_.at(k - 1);
}

std::vector<std::string> TimeSeriesFrame::series_names() const {
    std::vector<std::string> names{"total"};
    names.insert(names.end(), stations_.begin(), stations_.end());
    return names;
}

ClockRange covering_range(const std::vector<SessionRecord>& records) {
    if (records.empty()) throw ContractError("no sessions");
    Timestamp lo = records.front().connect;
    Timestamp hi = records.front().disconnect;
    for (const auto& r : records) {
        lo = std::min(lo, r.connect);
        hi = std::max(hi, r.disconnect);
    }
    return {floor_hour(lo), ceil_hour(hi)};
}

TimeSeriesFrame aggregate_sessions(const std::vector<SessionRecord>& records, const ClockRange& range,
                                   const std::vector<std::string>& known_stations) {
    if (!on_hour(range.start) || !on_hour(range.end) || range.end <= range.start) {
        throw ContractError("clock range must be hour aligned and non-empty");
    }
    const auto length = static_cast<std::size_t>(std::chrono::duration_cast<hours>(range.end - range.start).count());

    std::vector<std::string> stations = known_stations;
    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < stations.size(); ++i) column[stations[i]] = i;
    std::vector<std::vector<double>> series(stations.size(), std::vector<double>(length, 0.0));

    for (std::size_t idx = 0; idx < records.size(); ++idx) {
        const auto& r = records[idx];
        if (r.disconnect <= r.connect) {
            throw ContractError("session record " + std::to_string(idx) + ": disconnect time is not after connect time");
        }
        if (!(r.energy_kwh >= 0.0) || !std::isfinite(r.energy_kwh)) {
            throw ContractError("session record " + std::to_string(idx) + ": energy must be a finite value >= 0");
        }
        if (r.connect < range.start || r.disconnect > range.end) {
            throw ContractError("session record " + std::to_string(idx) + " lies outside the clock range");
        }
        auto it = column.find(r.station_id);
        if (it == column.end()) {
            if (!known_stations.empty()) spdlog::warn("unknown station '{}' gets a new column", r.station_id);
            it = column.emplace(r.station_id, stations.size()).first;
            stations.push_back(r.station_id);
            series.emplace_back(length, 0.0);
        }
        auto& target = series[it->second];
        const double duration = static_cast<double>((r.disconnect - r.connect).count());
        Timestamp hour = floor_hour(r.connect);
        while (hour < r.disconnect) {
            const Timestamp next = hour + hours{1};
            const auto overlap = std::min(next, r.disconnect) - std::max(hour, r.connect);
            const auto bin = static_cast<std::size_t>(std::chrono::duration_cast<hours>(hour - range.start).count());
            target[bin] += r.energy_kwh * static_cast<double>(overlap.count()) / duration;
            hour = next;
        }
    }
    return TimeSeriesFrame(range.start, std::move(stations), std::move(series));
}

std::vector<SessionRecord> read_sessions_csv(const std::string& path) {
    const auto table = read_csv_file(path);
    const auto c_station = table.column("station_id");
    const auto c_connect = table.column("connect_time");
    const auto c_disconnect = table.column("disconnect_time");
    const auto c_energy = table.column("energy_kwh");
    std::vector<SessionRecord> records;
    records.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        if (row.fields.size() != table.header.size()) {
            throw InputError(path, row.line, "expected " + std::to_string(table.header.size()) + " fields");
        }
        const auto connect = parse_timestamp(row.fields[c_connect]);
        const auto disconnect = parse_timestamp(row.fields[c_disconnect]);
        const auto energy = parse_number(row.fields[c_energy]);
        if (!connect || !disconnect) throw InputError(path, row.line, "malformed timestamp");
        if (!energy) throw InputError(path, row.line, "malformed energy value");
        if (*disconnect <= *connect) throw InputError(path, row.line, "disconnect time is not after connect time");
        if (*energy < 0.0) throw InputError(path, row.line, "negative energy");
        if (row.fields[c_station].empty()) throw InputError(path, row.line, "empty station id");
        records.push_back({row.fields[c_station], *connect, *disconnect, *energy});
    }
    if (records.empty()) throw InputError(path, 0, "no sessions");
    return records;
}

std::string hourly_csv(const TimeSeriesFrame& frame) {
    std::ostringstream out;
    out << "timestamp";
    for (const auto& s : frame.stations()) out << ',' << s;
    out << ",total\n";
    for (std::size_t t = 0; t < frame.length(); ++t) {
        out << format_timestamp(frame.timestamp(t));
        for (std::size_t s = 0; s < frame.station_count(); ++s) out << ',' << format_number(frame.station(s)[t]);
        out << ',' << format_number(frame.total()[t]) << '\n';
    }
    return out.str();
}

void write_hourly_csv(const TimeSeriesFrame& frame, const std::string& path) { write_text_file(path, hourly_csv(frame)); }

TimeSeriesFrame read_hourly_csv(const std::string& path) {
    const auto table = read_csv_file(path);
    if (table.header.size() < 3 || table.header.front() != "timestamp" || table.header.back() != "total") {
        throw InputError(path, 1, "expected header timestamp,<stations...>,total");
    }
    const std::size_t n = table.header.size() - 2;
    std::vector<std::string> stations(table.header.begin() + 1, table.header.end() - 1);
    std::vector<std::vector<double>> series(n);
    std::vector<double> file_total;
    Timestamp start{};
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.fields.size() != table.header.size()) throw InputError(path, row.line, "wrong field count");
        const auto ts = parse_timestamp(row.fields[0]);
        if (!ts || !on_hour(*ts)) throw InputError(path, row.line, "malformed hourly timestamp");
        if (r == 0) {
            start = *ts;
        } else if (*ts != start + hours{static_cast<long>(r)}) {
            throw InputError(path, row.line, "hourly timestamps must be contiguous");
        }
        for (std::size_t s = 0; s < n; ++s) {
            const auto v = parse_number(row.fields[s + 1]);
            if (!v) throw InputError(path, row.line, "malformed value");
            series[s].push_back(*v);
        }
        const auto total = parse_number(row.fields.back());
        if (!total) throw InputError(path, row.line, "malformed total");
        file_total.push_back(*total);
    }
    if (table.rows.empty()) throw InputError(path, 0, "no hourly rows");
    TimeSeriesFrame frame(start, std::move(stations), std::move(series));
    for (std::size_t t = 0; t < frame.length(); ++t) {
        if (std::abs(frame.total()[t] - file_total[t]) > 1e-6 * (1.0 + std::abs(file_total[t]))) {
            throw InputError(path, table.rows[t].line, "total column does not equal the sum of stations");
        }
    }
    return frame;
}

}  // namespace coherentcast
