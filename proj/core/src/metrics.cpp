#include "coherentcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/fisher_f.hpp>

#include "coherentcast/errors.hpp"

namespace coherentcast {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
    if (a.empty()) throw ContractError("metric input is empty");
    if (a.size() != b.size()) {
        throw ContractError("metric inputs differ in length (" + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()) + ")");
    }
}

void check_level(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("level must lie in (0, 1)");
}

}  // namespace

double mae(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double s = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) s += std::abs(actual[t] - predicted[t]);
    return s / static_cast<double>(actual.size());
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double s = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) s += (actual[t] - predicted[t]) * (actual[t] - predicted[t]);
    return std::sqrt(s / static_cast<double>(actual.size()));
}

std::optional<double> mase(std::span<const double> actual, std::span<const double> predicted, std::size_t t0) {
    check_pair(actual, predicted);
    if (t0 == 0 || actual.size() <= t0) {
        throw ContractError("MASE(" + std::to_string(t0) + ") needs more than " + std::to_string(t0) + " steps");
    }
    double num = 0.0, den = 0.0;
    for (std::size_t t = t0; t < actual.size(); ++t) {
        num += std::abs(actual[t] - predicted[t]);
        den += std::abs(actual[t] - actual[t - t0]);
    }
    if (den == 0.0) return std::nullopt;
    return num / den;
}

std::optional<double> mase_with_lagged(std::span<const double> actual, std::span<const double> predicted,
                                       std::span<const double> lagged) {
    check_pair(actual, predicted);
    check_pair(actual, lagged);
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        num += std::abs(actual[t] - predicted[t]);
        den += std::abs(actual[t] - lagged[t]);
    }
    if (den == 0.0) return std::nullopt;
    return num / den;
}

PointMetrics point_metrics(std::span<const double> actual, std::span<const double> predicted,
                           const std::vector<std::size_t>& t0s) {
    PointMetrics out;
    out.mae = mae(actual, predicted);
    out.rmse = rmse(actual, predicted);
    for (const auto t0 : t0s) out.mase[t0] = mase(actual, predicted, t0);
    return out;
}

double pinball(double actual, double predicted, double alpha) {
    return actual >= predicted ? alpha * (actual - predicted) : (1.0 - alpha) * (predicted - actual);
}

double quantile_loss(std::span<const double> actual, std::span<const double> predicted, double alpha) {
    check_pair(actual, predicted);
    check_level(alpha);
    double s = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) s += pinball(actual[t], predicted[t], alpha);
    return s / static_cast<double>(actual.size());
}

double winkler_step(double actual, double lower, double upper, double alpha) {
    if (lower > upper) throw ContractError("interval lower bound exceeds upper bound");
    const double width = upper - lower;
    if (actual < lower) return width + 2.0 / (1.0 - alpha) * (lower - actual);
    if (actual > upper) return width + 2.0 / (1.0 - alpha) * (actual - upper);
    return width;
}

double winkler(std::span<const double> actual, std::span<const double> lower, std::span<const double> upper,
               double alpha) {
    check_pair(actual, lower);
    check_pair(actual, upper);
    check_level(alpha);
    double s = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        if (lower[t] > upper[t]) throw ContractError("interval lower bound exceeds upper bound at step " + std::to_string(t));
        s += winkler_step(actual[t], lower[t], upper[t], alpha);
    }
    return s / static_cast<double>(actual.size());
}

double sorted_quantile(std::span<const double> sorted, double alpha) {
    if (sorted.empty()) throw ContractError("quantile of an empty sample");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("level must lie in [0, 1]");
    const double pos = alpha * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double empirical_quantile(std::vector<double> values, double alpha) {
    std::sort(values.begin(), values.end());
    return sorted_quantile(values, alpha);
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw ContractError("ANOVA needs at least two groups");
    double total = 0.0, squares = 0.0;
    std::size_t count = 0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw ContractError("ANOVA needs at least two observations per group");
        for (const double v : g) {
            total += v;
            squares += v * v;
        }
        count += g.size();
    }
    const double grand = total / static_cast<double>(count);
    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups) {
        double mean = 0.0;
        for (const double v : g) mean += v;
        mean /= static_cast<double>(g.size());
        ssb += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
        for (const double v : g) ssw += (v - mean) * (v - mean);
    }
    AnovaResult r;
    r.df_between = static_cast<double>(groups.size() - 1);
    r.df_within = static_cast<double>(count - groups.size());
    // Sums of squares this small relative to the data are rounding noise.
    const double noise = std::max(1.0, squares) * 1e-24;
    if (ssb <= noise) ssb = 0.0;
    if (ssw <= noise) ssw = 0.0;
    if (ssb == 0.0) {
        r.f = 0.0;
        r.p = 1.0;
        return r;
    }
    if (ssw == 0.0) {
        r.f = std::numeric_limits<double>::infinity();
        r.p = 0.0;
        return r;
    }
    r.f = (ssb / r.df_between) / (ssw / r.df_within);
    const boost::math::fisher_f dist(r.df_between, r.df_within);
    r.p = boost::math::cdf(boost::math::complement(dist, r.f));
    return r;
}

AnovaTable anova_table(const std::vector<std::vector<double>>& groups) {
    AnovaTable t;
    t.overall = anova_oneway(groups);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) t.pairwise.push_back({i, j, anova_oneway({groups[i], groups[j]})});
    }
    return t;
}

}  // namespace coherentcast
