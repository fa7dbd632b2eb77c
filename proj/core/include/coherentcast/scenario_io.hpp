#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coherentcast/tensor.hpp"
#include "coherentcast/timestamp.hpp"

namespace coherentcast {

/// m scenarios x D series x horizon steps for one forecast origin, in original units.
struct ScenarioTensor {
    Timestamp origin{};
    std::uint64_t seed = 0;
    std::vector<std::string> series;
    std::size_t count = 0;
    std::size_t horizon = 0;
    std::vector<double> data;  ///< index (i * D + k) * horizon + t

    static ScenarioTensor zeros(Timestamp origin, std::vector<std::string> series, std::size_t count, std::size_t horizon);

    std::size_t dimension() const noexcept { return series.size(); }
    double& at(std::size_t i, std::size_t k, std::size_t t) { return data[(i * series.size() + k) * horizon + t]; }
    double at(std::size_t i, std::size_t k, std::size_t t) const { return data[(i * series.size() + k) * horizon + t]; }

    /// Scenario i at step t as a D-vector.
    Eigen::VectorXd vector(std::size_t i, std::size_t t) const;
    /// All scenarios at step t, one per row (m x D).
    RowMatrix step(std::size_t t) const;
    /// Per-series m x horizon block.
    RowMatrix series_block(std::size_t k) const;
    void set_series_block(std::size_t k, const RowMatrix& block);
};

/**
 * File layout: the first line is a JSON object
 *   {"shape":[m,D,horizon],"origin":"...","seed":N,"series":[...],"units":"kWh"}
 * followed by a CSV table with header scenario,series,h1..hH and m * D rows.
 */
std::string scenario_text(const ScenarioTensor& s);
ScenarioTensor parse_scenarios(const std::string& text, const std::string& source);
void write_scenarios(const ScenarioTensor& s, const std::string& path);
ScenarioTensor read_scenarios(const std::string& path);

/// Path of the scenario file for an origin: dir/<partition>/<YYYY-MM-DDTHH-MM>.csv
std::string scenario_path(const std::string& dir, const std::string& partition, Timestamp origin);
/// Sorted scenario files of a partition; empty when the directory is missing.
std::vector<std::string> list_scenario_files(const std::string& dir, const std::string& partition);

}  // namespace coherentcast
