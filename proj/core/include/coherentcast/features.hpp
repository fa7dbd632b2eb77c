#pragma once

#include <string>
#include <vector>

#include "coherentcast/sessions.hpp"
#include "coherentcast/tensor.hpp"
#include "coherentcast/weather.hpp"

namespace coherentcast {

/// Hourly covariates aligned with a TimeSeriesFrame (row t <-> frame hour t).
struct Covariates {
    Timestamp start{};
    std::vector<std::string> names;
    RowMatrix values;  ///< length x names.size()

    std::size_t length() const noexcept { return static_cast<std::size_t>(values.rows()); }
    std::size_t width() const noexcept { return names.size(); }
};

/// Column layout emitted by build_features.
inline const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names{"temp_c",  "dewpoint_c", "precip_mm",  "holiday",   "weekday",
                                                "hod_sin", "hod_cos",    "hoy_sin",    "hoy_cos"};
    return names;
}

/// First column of the calendar block; calendar columns are known ahead of time.
inline constexpr std::size_t kCalendarOffset = 3;
inline constexpr std::size_t kCalendarWidth = 6;

/// Calendar block [holiday, weekday, sin/cos hour-of-day, sin/cos hour-of-year] for one hour.
std::vector<double> calendar_features(Timestamp t, const HolidaySet& holidays);

/**
 * @brief Weather plus calendar covariates for every hour of the frame.
 *
 * Interior gaps in each weather column are linearly interpolated in time; gaps
 * before the first or after the last observation take the nearest value.
 * Throws ConfigError for an empty weather table or a column with no observations.
 */
Covariates build_features(const TimeSeriesFrame& frame, const WeatherTable& weather, const HolidaySet& holidays);

std::string covariates_csv(const Covariates& cov);
void write_covariates_csv(const Covariates& cov, const std::string& path);
Covariates read_covariates_csv(const std::string& path);

}  // namespace coherentcast
