#include "coherentcast/scenario_io.hpp"

#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "coherentcast/csv.hpp"
#include "coherentcast/errors.hpp"

namespace coherentcast {

ScenarioTensor ScenarioTensor::zeros(Timestamp origin, std::vector<std::string> series, std::size_t count,
                                     std::size_t horizon) {
    ScenarioTensor s;
    s.origin = origin;
    s.series = std::move(series);
    s.count = count;
    s.horizon = horizon;
    s.data.assign(count * s.series.size() * horizon, 0.0);
    return s;
}

Eigen::VectorXd ScenarioTensor::vector(std::size_t i, std::size_t t) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(dimension()));
    for (std::size_t k = 0; k < dimension(); ++k) v(static_cast<Eigen::Index>(k)) = at(i, k, t);
    return v;
}

RowMatrix ScenarioTensor::step(std::size_t t) const {
    RowMatrix m(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dimension()));
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t k = 0; k < dimension(); ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = at(i, k, t);
    }
    return m;
}

RowMatrix ScenarioTensor::series_block(std::size_t k) const {
    RowMatrix m(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(horizon));
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t t = 0; t < horizon; ++t) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = at(i, k, t);
    }
    return m;
}

void ScenarioTensor::set_series_block(std::size_t k, const RowMatrix& block) {
    if (static_cast<std::size_t>(block.rows()) != count || static_cast<std::size_t>(block.cols()) != horizon) {
        throw ContractError("scenario block has the wrong shape");
    }
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t t = 0; t < horizon; ++t) at(i, k, t) = block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
    }
}

std::string scenario_text(const ScenarioTensor& s) {
    nlohmann::json header;
    header["shape"] = {s.count, s.dimension(), s.horizon};
    header["origin"] = format_timestamp(s.origin);
    header["seed"] = s.seed;
    header["series"] = s.series;
    header["units"] = "kWh";
    std::string out = header.dump() + "\nscenario,series";
    for (std::size_t t = 0; t < s.horizon; ++t) out += ",h" + std::to_string(t + 1);
    out += "\n";
    for (std::size_t i = 0; i < s.count; ++i) {
        for (std::size_t k = 0; k < s.dimension(); ++k) {
            out += std::to_string(i) + "," + s.series[k];
            for (std::size_t t = 0; t < s.horizon; ++t) out += "," + format_number(s.at(i, k, t));
            out += "\n";
        }
    }
    return out;
}

ScenarioTensor parse_scenarios(const std::string& text, const std::string& source) {
    const auto newline = text.find('\n');
    if (newline == std::string::npos) throw InputError(source, 1, "missing scenario header");
    ScenarioTensor s;
    try {
        const auto header = nlohmann::json::parse(text.substr(0, newline));
        const auto shape = header.at("shape").get<std::vector<std::size_t>>();
        if (shape.size() != 3) throw InputError(source, 1, "shape must have three entries");
        const auto origin = parse_timestamp(header.at("origin").get<std::string>());
        if (!origin) throw InputError(source, 1, "bad origin timestamp");
        s = ScenarioTensor::zeros(*origin, header.at("series").get<std::vector<std::string>>(), shape[0], shape[2]);
        s.seed = header.at("seed").get<std::uint64_t>();
        if (s.dimension() != shape[1]) throw InputError(source, 1, "series list does not match the declared shape");
    } catch (const nlohmann::json::exception& e) {
        throw InputError(source, 1, std::string("malformed scenario header: ") + e.what());
    }
    const auto table = parse_csv(std::string_view(text).substr(newline + 1), source);
    if (table.rows.size() != s.count * s.dimension()) {
        throw InputError(source, 0, "expected " + std::to_string(s.count * s.dimension()) + " scenario rows, found " +
                                        std::to_string(table.rows.size()));
    }
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = row.line + 1;
        if (row.fields.size() != 2 + s.horizon) throw InputError(source, line, "wrong number of columns");
        const std::size_t i = r / s.dimension(), k = r % s.dimension();
        if (row.fields[0] != std::to_string(i) || row.fields[1] != s.series[k]) {
            throw InputError(source, line, "rows must be ordered by scenario, then series");
        }
        for (std::size_t t = 0; t < s.horizon; ++t) {
            const auto v = parse_number(row.fields[2 + t]);
            if (!v) throw InputError(source, line, "bad number '" + row.fields[2 + t] + "'");
            s.at(i, k, t) = *v;
        }
    }
    return s;
}

void write_scenarios(const ScenarioTensor& s, const std::string& path) { write_text_file(path, scenario_text(s)); }

ScenarioTensor read_scenarios(const std::string& path) { return parse_scenarios(read_text_file(path), path); }

std::string scenario_path(const std::string& dir, const std::string& partition, Timestamp origin) {
    auto name = format_timestamp(origin);
    std::replace(name.begin(), name.end(), ':', '-');
    return (std::filesystem::path(dir) / partition / (name + ".csv")).string();
}

std::vector<std::string> list_scenario_files(const std::string& dir, const std::string& partition) {
    std::vector<std::string> out;
    const auto root = std::filesystem::path(dir) / partition;
    if (!std::filesystem::is_directory(root)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") out.push_back(entry.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace coherentcast
