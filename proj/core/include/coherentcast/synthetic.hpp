#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "coherentcast/features.hpp"
#include "coherentcast/sessions.hpp"
#include "coherentcast/weather.hpp"

namespace coherentcast {

struct SyntheticSpec {
    Timestamp start = Timestamp(std::chrono::sys_days(std::chrono::year{2023} / 1 / 2));
    std::size_t days = 60;
    std::size_t stations = 3;
    std::uint64_t seed = 7;
};

struct SyntheticData {
    std::vector<std::string> stations;
    std::vector<SessionRecord> sessions;
    WeatherTable weather;
    HolidaySet holidays;
};

/**
 * @brief Charging demand for a small station network.
 *
 * Each station's hourly demand is a daily and weekly sinusoidal profile,
 * damped on holidays and in cold weather, with heteroscedastic noise whose
 * size differs per station and with occasional zero-demand hours. Every
 * positive hour becomes one session inside that hour. About 2% of weather
 * cells are blank.
 */
SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Writes sessions.csv, weather.csv and holidays.txt into `dir`.
void write_synthetic(const SyntheticData& data, const std::string& dir);

/**
 * @brief Series whose value at hour t is N(mean(t), sd(t)^2) independently,
 * with mean and sd smooth functions of the hour of day.
 */
struct ConditionalGaussian {
    double base = 3.0;
    double amplitude = 1.5;
    double sd_base = 0.6;
    double sd_amplitude = 0.4;

    double mean(Timestamp t) const;
    double stddev(Timestamp t) const;
    /// Oracle quantile mean + sd * Phi^-1(alpha).
    double quantile(Timestamp t, double alpha) const;
};

struct GaussianDataset {
    ConditionalGaussian law;
    TimeSeriesFrame frame;  ///< one station; the total equals it
    Covariates covariates;
};

GaussianDataset generate_gaussian(const ConditionalGaussian& law, Timestamp start, std::size_t hours, std::uint64_t seed);

}  // namespace coherentcast
