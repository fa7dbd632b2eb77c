#include "coherentcast/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <utility>

#include "coherentcast/csv.hpp"
#include "coherentcast/errors.hpp"

namespace coherentcast {

using std::chrono::hours;

std::vector<double> calendar_features(Timestamp t, const HolidaySet& holidays) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double hod = two_pi * hour_of_day(t) / 24.0;
    const double hoy = two_pi * hour_of_year(t) / 8760.0;
    return {holidays.count(date_of(t)) ? 1.0 : 0.0,
            is_weekday(t) ? 1.0 : 0.0,
            std::sin(hod),
            std::cos(hod),
            std::sin(hoy),
            std::cos(hoy)};
}

namespace {

using Observation = std::pair<double, double>;  // (minutes since epoch, value)

std::vector<Observation> observations(const WeatherTable& weather, const std::optional<double> WeatherRow::*field) {
    std::vector<Observation> obs;
    for (const auto& row : weather) {
        if (const auto& v = row.*field) obs.emplace_back(static_cast<double>(row.time.time_since_epoch().count()), *v);
    }
    std::sort(obs.begin(), obs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return obs;
}

double interpolate(const std::vector<Observation>& obs, double t) {
    const auto upper = std::lower_bound(obs.begin(), obs.end(), t, [](const Observation& o, double x) { return o.first < x; });
    if (upper == obs.end()) return obs.back().second;
    if (upper->first == t || upper == obs.begin()) return upper->second;
    const auto lower = upper - 1;
    const double w = (t - lower->first) / (upper->first - lower->first);
    return lower->second + w * (upper->second - lower->second);
}

}  // namespace

Covariates build_features(const TimeSeriesFrame& frame, const WeatherTable& weather, const HolidaySet& holidays) {
    if (weather.empty()) throw ConfigError("weather table is empty");
    const std::optional<double> WeatherRow::*fields[] = {&WeatherRow::temp_c, &WeatherRow::dewpoint_c,
                                                         &WeatherRow::precip_mm};
    const char* field_names[] = {"temp_c", "dewpoint_c", "precip_mm"};

    Covariates cov;
    cov.start = frame.start();
    cov.names = feature_names();
    cov.values.resize(static_cast<Eigen::Index>(frame.length()), static_cast<Eigen::Index>(cov.names.size()));

    for (std::size_t f = 0; f < 3; ++f) {
        const auto obs = observations(weather, fields[f]);
        if (obs.empty()) throw ConfigError(std::string("weather column ") + field_names[f] + " has no observations");
        for (std::size_t t = 0; t < frame.length(); ++t) {
            const double minute = static_cast<double>(frame.timestamp(t).time_since_epoch().count());
            cov.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(f)) = interpolate(obs, minute);
        }
    }
    for (std::size_t t = 0; t < frame.length(); ++t) {
        const auto cal = calendar_features(frame.timestamp(t), holidays);
        for (std::size_t c = 0; c < cal.size(); ++c) {
            cov.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(kCalendarOffset + c)) = cal[c];
        }
    }
    return cov;
}

std::string covariates_csv(const Covariates& cov) {
    std::ostringstream out;
    out << "timestamp";
    for (const auto& n : cov.names) out << ',' << n;
    out << '\n';
    for (std::size_t t = 0; t < cov.length(); ++t) {
        out << format_timestamp(cov.start + hours{static_cast<long>(t)});
        for (std::size_t c = 0; c < cov.width(); ++c) {
            out << ',' << format_number(cov.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)));
        }
        out << '\n';
    }
    return out.str();
}

void write_covariates_csv(const Covariates& cov, const std::string& path) { write_text_file(path, covariates_csv(cov)); }

Covariates read_covariates_csv(const std::string& path) {
    const auto table = read_csv_file(path);
    if (table.header.empty() || table.header.front() != "timestamp") throw InputError(path, 1, "expected timestamp column first");
    Covariates cov;
    cov.names.assign(table.header.begin() + 1, table.header.end());
    cov.values.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(cov.names.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.fields.size() != table.header.size()) throw InputError(path, row.line, "wrong field count");
        const auto ts = parse_timestamp(row.fields[0]);
        if (!ts) throw InputError(path, row.line, "malformed timestamp");
        if (r == 0) {
            cov.start = *ts;
        } else if (*ts != cov.start + hours{static_cast<long>(r)}) {
            throw InputError(path, row.line, "hourly timestamps must be contiguous");
        }
        for (std::size_t c = 0; c < cov.names.size(); ++c) {
            const auto v = parse_number(row.fields[c + 1]);
            if (!v) throw InputError(path, row.line, "malformed value");
            cov.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *v;
        }
    }
    if (table.rows.empty()) throw InputError(path, 0, "no covariate rows");
    return cov;
}

}  // namespace coherentcast
