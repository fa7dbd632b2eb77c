#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coherentcast/timestamp.hpp"

namespace coherentcast {

struct WeatherRow {
    Timestamp time;
    std::optional<double> temp_c;
    std::optional<double> dewpoint_c;
    std::optional<double> precip_mm;
};

/// Hourly weather observations; blank cells are kept as nullopt and interpolated later.
using WeatherTable = std::vector<WeatherRow>;
using HolidaySet = std::set<Date>;

/// CSV schema: timestamp,temp_c,dewpoint_c,precip_mm. Blank cells allowed.
WeatherTable parse_weather_csv(const std::string& text, const std::string& source);
std::string weather_csv(const WeatherTable& table);

/// Source of the weather table used by feature building.
class WeatherProvider {
public:
    virtual ~WeatherProvider() = default;
    virtual WeatherTable load() const = 0;
};

class FileWeatherProvider final : public WeatherProvider {
public:
    explicit FileWeatherProvider(std::string path) : path_(std::move(path)) {}
    WeatherTable load() const override;

private:
    std::string path_;
};

/// GETs the weather CSV from an http:// URL. Non-200 responses throw InputError naming the URL.
class HttpWeatherProvider final : public WeatherProvider {
public:
    explicit HttpWeatherProvider(std::string url) : url_(std::move(url)) {}
    WeatherTable load() const override;

private:
    std::string url_;
};

/// "http://..." selects the HTTP provider, anything else is a file path.
std::unique_ptr<WeatherProvider> make_weather_provider(const std::string& location);

/// One ISO date per line; blank lines and '#' comments ignored.
HolidaySet read_holidays(const std::string& path);
HolidaySet parse_holidays(const std::string& text, const std::string& source);

}  // namespace coherentcast
