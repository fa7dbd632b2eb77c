#include "coherentcast/weather.hpp"

#include <sstream>

#include <httplib.h>

#include "coherentcast/csv.hpp"
#include "coherentcast/errors.hpp"

namespace coherentcast {

namespace {

std::optional<double> optional_cell(const CsvRow& row, std::size_t col, const std::string& source) {
    if (col >= row.fields.size() || row.fields[col].empty()) return std::nullopt;
    const auto v = parse_number(row.fields[col]);
    if (!v) throw InputError(source, row.line, "malformed weather value '" + row.fields[col] + "'");
    return v;
}

}  // namespace

WeatherTable parse_weather_csv(const std::string& text, const std::string& source) {
    const auto table = parse_csv(text, source);
    const auto c_time = table.column("timestamp");
    const auto c_temp = table.column("temp_c");
    const auto c_dew = table.column("dewpoint_c");
    const auto c_precip = table.column("precip_mm");
    WeatherTable out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        const auto ts = c_time < row.fields.size() ? parse_timestamp(row.fields[c_time]) : std::nullopt;
        if (!ts) throw InputError(source, row.line, "malformed timestamp");
        out.push_back({*ts, optional_cell(row, c_temp, source), optional_cell(row, c_dew, source),
                       optional_cell(row, c_precip, source)});
    }
    return out;
}

std::string weather_csv(const WeatherTable& table) {
    std::ostringstream out;
    out << "timestamp,temp_c,dewpoint_c,precip_mm\n";
    auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    for (const auto& r : table) {
        out << format_timestamp(r.time) << ',' << cell(r.temp_c) << ',' << cell(r.dewpoint_c) << ','
            << cell(r.precip_mm) << '\n';
    }
    return out.str();
}

WeatherTable FileWeatherProvider::load() const { return parse_weather_csv(read_text_file(path_), path_); }

WeatherTable HttpWeatherProvider::load() const {
    const std::string prefix = "http://";
    if (url_.rfind(prefix, 0) != 0) throw ConfigError("weather URL must start with http://: " + url_);
    const auto slash = url_.find('/', prefix.size());
    const std::string host = url_.substr(0, slash);
    const std::string path = slash == std::string::npos ? "/" : url_.substr(slash);
    httplib::Client client(host);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    const auto res = client.Get(path.c_str());
    if (!res) throw InputError(url_, 0, "weather request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw InputError(url_, 0, "weather request returned HTTP " + std::to_string(res->status));
    return parse_weather_csv(res->body, url_);
}

std::unique_ptr<WeatherProvider> make_weather_provider(const std::string& location) {
    if (location.rfind("http://", 0) == 0) return std::make_unique<HttpWeatherProvider>(location);
    return std::make_unique<FileWeatherProvider>(location);
}

HolidaySet parse_holidays(const std::string& text, const std::string& source) {
    HolidaySet out;
    const auto table = parse_csv(text, source, false);
    for (const auto& row : table.rows) {
        if (row.fields.empty() || row.fields[0].empty() || row.fields[0][0] == '#') continue;
        const auto d = parse_date(row.fields[0]);
        if (!d) throw InputError(source, row.line, "malformed date '" + row.fields[0] + "'");
        out.insert(*d);
    }
    return out;
}

HolidaySet read_holidays(const std::string& path) { return parse_holidays(read_text_file(path), path); }

}  // namespace coherentcast
