#include "coherentcast/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "coherentcast/csv.hpp"
#include "coherentcast/random.hpp"

namespace coherentcast {

namespace {

using std::chrono::hours;
using std::chrono::minutes;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string sessions_csv(const std::vector<SessionRecord>& sessions) {
    std::string out = "station_id,connect_time,disconnect_time,energy_kwh\n";
    for (const auto& s : sessions) {
        out += s.station_id + "," + format_timestamp(s.connect) + "," + format_timestamp(s.disconnect) + "," +
               format_number(s.energy_kwh) + "\n";
    }
    return out;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    Rng rng(spec.seed);
    SyntheticData data;
    for (std::size_t s = 0; s < spec.stations; ++s) data.stations.push_back("station_" + std::to_string(s + 1));

    const auto first_day = std::chrono::floor<std::chrono::days>(spec.start);
    for (std::size_t d = 0; d < spec.days; ++d) {
        if (rng.uniform() < 0.05) data.holidays.insert(first_day + std::chrono::days(d));
    }

    const std::size_t length = spec.days * 24;
    std::vector<double> temp(length);
    for (std::size_t t = 0; t < length; ++t) {
        const Timestamp now = spec.start + hours(t);
        const double daily = std::sin(kTwoPi * (hour_of_day(now) - 9) / 24.0);
        const double seasonal = std::sin(kTwoPi * hour_of_year(now) / 8760.0);
        temp[t] = 8.0 + 6.0 * seasonal + 5.0 * daily + rng.normal();
        WeatherRow row{now, temp[t], temp[t] - 3.0 - std::abs(rng.normal()), rng.uniform() < 0.1 ? rng.uniform(0.0, 4.0) : 0.0};
        if (rng.uniform() < 0.02) row.temp_c.reset();
        if (rng.uniform() < 0.02) row.dewpoint_c.reset();
        if (rng.uniform() < 0.02) row.precip_mm.reset();
        data.weather.push_back(row);
    }

    for (std::size_t s = 0; s < spec.stations; ++s) {
        const double scale = 6.0 + 4.0 * static_cast<double>(s);
        const double noise = 0.15 + 0.15 * static_cast<double>(s);
        const double phase = static_cast<double>(s);
        for (std::size_t t = 0; t < length; ++t) {
            const Timestamp now = spec.start + hours(t);
            const double hod = hour_of_day(now);
            const double daily = 0.5 + 0.5 * std::sin(kTwoPi * (hod - 7.0 - phase) / 24.0);
            const double weekly = is_weekday(now) ? 1.0 : 0.55;
            const double holiday = data.holidays.count(date_of(now)) ? 0.4 : 1.0;
            const double weather = 1.0 - 0.02 * std::max(0.0, 5.0 - temp[t]);
            const double level = scale * daily * daily * weekly * holiday * weather;
            double demand = level * (1.0 + noise * rng.normal());
            if (rng.uniform() < 0.08 || demand < 0.05) demand = 0.0;
            if (demand <= 0.0) continue;
            data.sessions.push_back({data.stations[s], now + minutes(5), now + minutes(55), demand});
        }
    }
    std::stable_sort(data.sessions.begin(), data.sessions.end(),
                     [](const SessionRecord& a, const SessionRecord& b) { return a.connect < b.connect; });
    return data;
}

void write_synthetic(const SyntheticData& data, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path root(dir);
    write_text_file((root / "sessions.csv").string(), sessions_csv(data.sessions));
    write_text_file((root / "weather.csv").string(), weather_csv(data.weather));
    std::string hol;
    for (const auto& d : data.holidays) hol += format_date(d) + "\n";
    write_text_file((root / "holidays.txt").string(), hol);
}

double ConditionalGaussian::mean(Timestamp t) const {
    return base + amplitude * std::sin(kTwoPi * hour_of_day(t) / 24.0);
}

double ConditionalGaussian::stddev(Timestamp t) const {
    return sd_base + sd_amplitude * std::cos(kTwoPi * hour_of_day(t) / 24.0);
}

double ConditionalGaussian::quantile(Timestamp t, double alpha) const {
    return boost::math::quantile(boost::math::normal(mean(t), stddev(t)), alpha);
}

GaussianDataset generate_gaussian(const ConditionalGaussian& law, Timestamp start, std::size_t length, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> values(length);
    WeatherTable weather;
    for (std::size_t t = 0; t < length; ++t) {
        const Timestamp now = start + hours(t);
        values[t] = law.mean(now) + law.stddev(now) * rng.normal();
    }
    weather.push_back({start, 0.0, 0.0, 0.0});
    GaussianDataset out{law, TimeSeriesFrame(start, {"gauss"}, {values}), {}};
    out.covariates = build_features(out.frame, weather, {});
    return out;
}

}  // namespace coherentcast
