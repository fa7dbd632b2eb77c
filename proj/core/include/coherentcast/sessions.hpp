#pragma once

#include <string>
#include <vector>

#include "coherentcast/timestamp.hpp"

namespace coherentcast {

/// One charging session as recorded by the operator.
struct SessionRecord {
    std::string station_id;
    Timestamp connect;
    Timestamp disconnect;
    double energy_kwh = 0.0;
};

/// Half-open, hour-aligned clock range [start, end).
struct ClockRange {
    Timestamp start;
    Timestamp end;
};

/**
 * @brief Hourly demand per station plus the computed aggregate.
 *
 * Series index 0 is the aggregate ("total"); indices 1..n are the stations in
 * column order, matching the reconciliation vector x = [y, z_1..z_n].
 * The aggregate is always recomputed from the stations and never ingested.
 */
class TimeSeriesFrame {
public:
    TimeSeriesFrame() = default;
    TimeSeriesFrame(Timestamp start, std::vector<std::string> stations, std::vector<std::vector<double>> station_series);

    Timestamp start() const noexcept { return start_; }
    std::size_t length() const noexcept { return total_.size(); }
    Timestamp timestamp(std::size_t i) const;
    /// Index of the hour starting at t, or throws ContractError when out of range.
    std::size_t index_of(Timestamp t) const;

    std::size_t station_count() const noexcept { return stations_.size(); }
    const std::vector<std::string>& stations() const noexcept { return stations_; }
    const std::vector<double>& station(std::size_t i) const { return station_series_.at(i); }
    const std::vector<double>& total() const noexcept { return total_; }

    /// n + 1 series in hierarchy order: total first.
    std::size_t series_count() const noexcept { return stations_.size() + 1; }
    const std::vector<double>& series(std::size_t k) const;
    std::vector<std::string> series_names() const;

private:
    Timestamp start_{};
    std::vector<std::string> stations_;
    std::vector<std::vector<double>> station_series_;
    std::vector<double> total_;
};

/**
 * @brief Prorates session energy uniformly over each session's duration into hourly bins.
 *
 * Stations listed in `known_stations` keep that column order; any other station
 * gets a new column appended (with a logged warning). Throws ContractError naming
 * the record index when disconnect <= connect, energy < 0, or a record leaves the range.
 */
TimeSeriesFrame aggregate_sessions(const std::vector<SessionRecord>& records, const ClockRange& range,
                                   const std::vector<std::string>& known_stations = {});

/// Hour-aligned range covering every session.
ClockRange covering_range(const std::vector<SessionRecord>& records);

/// CSV header: station_id,connect_time,disconnect_time,energy_kwh. Throws InputError with the line number.
std::vector<SessionRecord> read_sessions_csv(const std::string& path);

/// CSV: timestamp, one column per station, total.
std::string hourly_csv(const TimeSeriesFrame& frame);
void write_hourly_csv(const TimeSeriesFrame& frame, const std::string& path);
/// Reads the hourly file back; the total column is recomputed and checked against the file.
TimeSeriesFrame read_hourly_csv(const std::string& path);

}  // namespace coherentcast
