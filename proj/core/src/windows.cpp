#include "coherentcast/windows.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coherentcast/errors.hpp"

namespace coherentcast {

using std::chrono::hours;

std::vector<FeatureWindow> make_windows(const std::vector<double>& target, const Covariates& covariates,
                                        const WindowShape& shape) {
    if (shape.context == 0 || shape.horizon == 0) throw ContractError("context and horizon must be >= 1");
    const std::size_t length = target.size();
    if (covariates.length() != length) throw ContractError("covariates and target differ in length");
    if (covariates.width() < kCalendarOffset + kCalendarWidth) throw ContractError("covariates lack the calendar block");
    if (length < shape.context + shape.horizon) {
        throw EmptyDatasetError("series of length " + std::to_string(length) + " is shorter than context + horizon = " +
                                std::to_string(shape.context + shape.horizon));
    }
    const auto ctx = static_cast<Eigen::Index>(shape.context);
    const auto hor = static_cast<Eigen::Index>(shape.horizon);
    const auto width = static_cast<Eigen::Index>(covariates.width());
    const std::size_t count = length - shape.context - shape.horizon + 1;

    std::vector<FeatureWindow> windows;
    windows.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        const auto first = static_cast<Eigen::Index>(w);
        FeatureWindow win;
        win.origin_index = w + shape.context;
        win.origin = covariates.start + hours{static_cast<long>(win.origin_index)};
        win.context.resize(ctx, 1 + width);
        for (Eigen::Index t = 0; t < ctx; ++t) win.context(t, 0) = target[static_cast<std::size_t>(first + t)];
        win.context.rightCols(width) = covariates.values.middleRows(first, ctx);
        win.future = covariates.values.block(first + ctx, static_cast<Eigen::Index>(kCalendarOffset), hor,
                                             static_cast<Eigen::Index>(kCalendarWidth));
        win.target.assign(target.begin() + static_cast<long>(win.origin_index),
                          target.begin() + static_cast<long>(win.origin_index + shape.horizon));
        windows.push_back(std::move(win));
    }
    return windows;
}

void validate(const SplitSpec& spec) {
    if (!(spec.train_end < spec.val_end)) throw ConfigError("split boundaries must increase: train_end < val_end");
    if (spec.test_end && !(spec.val_end < *spec.test_end)) {
        throw ConfigError("split boundaries must increase: val_end < test_end");
    }
    if (!(spec.reconciler_fraction > 0.0 && spec.reconciler_fraction < 1.0)) {
        throw ConfigError("reconciler fraction must lie in (0, 1)");
    }
}

std::size_t reconciler_train_count(std::size_t validation_count, double fraction) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(validation_count) * fraction + 1e-9));
}

Partitions<std::size_t> split_origins(const std::vector<Timestamp>& origins, const SplitSpec& spec) {
    validate(spec);
    std::vector<std::size_t> order(origins.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return origins[a] < origins[b]; });

    Partitions<std::size_t> parts;
    for (const auto idx : order) {
        const auto t = origins[idx];
        if (t < spec.train_end) {
            parts.base_train.push_back(idx);
        } else if (t < spec.val_end) {
            parts.base_val.push_back(idx);
        } else if (!spec.test_end || t < *spec.test_end) {
            parts.test.push_back(idx);
        }
    }
    const auto n_dcl = reconciler_train_count(parts.base_val.size(), spec.reconciler_fraction);
    parts.dcl_train.assign(parts.base_val.begin(), parts.base_val.begin() + static_cast<long>(n_dcl));
    parts.dcl_val.assign(parts.base_val.begin() + static_cast<long>(n_dcl), parts.base_val.end());

    const std::pair<const char*, const std::vector<std::size_t>*> checks[] = {
        {"base_train", &parts.base_train}, {"base_val", &parts.base_val}, {"test", &parts.test},
        {"dcl_train", &parts.dcl_train},   {"dcl_val", &parts.dcl_val}};
    for (const auto& [name, part] : checks) {
        if (part->empty()) throw ConfigError(std::string("partition ") + name + " is empty");
    }
    return parts;
}

Partitions<FeatureWindow> split_dataset(std::vector<FeatureWindow> windows, const SplitSpec& spec) {
    std::vector<Timestamp> origins;
    origins.reserve(windows.size());
    for (const auto& w : windows) origins.push_back(w.origin);
    const auto idx = split_origins(origins, spec);

    auto take = [&](const std::vector<std::size_t>& ids) {
        std::vector<FeatureWindow> out;
        out.reserve(ids.size());
        for (const auto i : ids) out.push_back(windows[i]);
        return out;
    };
    Partitions<FeatureWindow> parts;
    parts.base_train = take(idx.base_train);
    parts.base_val = take(idx.base_val);
    parts.test = take(idx.test);
    parts.dcl_train = take(idx.dcl_train);
    parts.dcl_val = take(idx.dcl_val);
    return parts;
}

MinMaxScaler MinMaxScaler::fit(const std::vector<double>& values) {
    if (values.empty()) throw ContractError("cannot fit a scaler on no values");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return {*lo, *hi};
}

}  // namespace coherentcast
