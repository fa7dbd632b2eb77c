#pragma once

#include <optional>
#include <vector>

#include "coherentcast/features.hpp"

namespace coherentcast {

/// One training sample for one series.
struct FeatureWindow {
    Timestamp origin{};            ///< first hour of the horizon
    std::size_t origin_index = 0;  ///< frame index of `origin`
    RowMatrix context;             ///< context x (1 + covariates): target first, then covariates
    RowMatrix future;              ///< horizon x kCalendarWidth known-future calendar covariates
    std::vector<double> target;    ///< horizon values
};

struct WindowShape {
    std::size_t context = 168;
    std::size_t horizon = 24;
};

/**
 * @brief Stride-1 sliding windows over a target series and its covariates.
 *
 * Yields L - context - horizon + 1 windows for a series of length L.
 * Throws ContractError for zero sizes or misaligned covariates and
 * EmptyDatasetError when L < context + horizon.
 */
std::vector<FeatureWindow> make_windows(const std::vector<double>& target, const Covariates& covariates,
                                        const WindowShape& shape);

/// Chronological split boundaries; origins are compared against them.
struct SplitSpec {
    Timestamp train_end{};  ///< origins < train_end go to base_train
    Timestamp val_end{};    ///< train_end <= origin < val_end go to base_val; later ones to test
    std::optional<Timestamp> test_end;  ///< when set, origins >= test_end are dropped
    double reconciler_fraction = 0.8;   ///< share of base_val used to train the reconciler
};

/// Throws ConfigError unless boundaries increase strictly and the fraction lies in (0, 1).
void validate(const SplitSpec& spec);

template <typename T>
struct Partitions {
    std::vector<T> base_train;
    std::vector<T> base_val;
    std::vector<T> test;
    std::vector<T> dcl_train;  ///< first share of base_val
    std::vector<T> dcl_val;    ///< remaining share of base_val
};

/// Index partitions of a list of origins (sorted internally, stable for ties).
/// Throws ConfigError naming the first empty partition.
Partitions<std::size_t> split_origins(const std::vector<Timestamp>& origins, const SplitSpec& spec);

Partitions<FeatureWindow> split_dataset(std::vector<FeatureWindow> windows, const SplitSpec& spec);

/// Number of leading base_val items that go to the reconciler's training share.
std::size_t reconciler_train_count(std::size_t validation_count, double fraction);

/// Min-max scaling to [0, 1] using extremes of a reference sample (training data).
struct MinMaxScaler {
    double min = 0.0;
    double max = 1.0;

    static MinMaxScaler fit(const std::vector<double>& values);
    double range() const noexcept { return max > min ? max - min : 1.0; }
    double scale(double x) const noexcept { return (x - min) / range(); }
    double unscale(double x) const noexcept { return x * range() + min; }
};

}  // namespace coherentcast
