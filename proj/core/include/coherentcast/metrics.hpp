#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace coherentcast {

double mae(std::span<const double> actual, std::span<const double> predicted);
double rmse(std::span<const double> actual, std::span<const double> predicted);

/**
 * @brief Mean absolute scaled error against the seasonal naive forecast x_{t - t0}.
 *
 * Both sums run over the steps t >= t0, so the lag exists inside the series.
 * Returns nullopt when the naive error is zero. Throws ContractError unless
 * the lengths match and exceed t0.
 */
std::optional<double> mase(std::span<const double> actual, std::span<const double> predicted, std::size_t t0);

/// Same ratio when the lagged actuals come from outside the evaluated window (lagged[t] = x_{t - t0}).
std::optional<double> mase_with_lagged(std::span<const double> actual, std::span<const double> predicted,
                                       std::span<const double> lagged);

struct PointMetrics {
    double mae = 0.0;
    double rmse = 0.0;
    std::map<std::size_t, std::optional<double>> mase;  ///< keyed by t0; nullopt is undefined
};

PointMetrics point_metrics(std::span<const double> actual, std::span<const double> predicted,
                           const std::vector<std::size_t>& t0s);

/// Pinball loss of one prediction.
double pinball(double actual, double predicted, double alpha);
/// Mean pinball loss over steps. Throws ContractError for empty or mismatched input, DomainError for alpha outside (0,1).
double quantile_loss(std::span<const double> actual, std::span<const double> predicted, double alpha);

/// Winkler score of one interval at confidence level alpha.
double winkler_step(double actual, double lower, double upper, double alpha);
/// Mean Winkler score. Throws ContractError when any lower bound exceeds its upper bound.
double winkler(std::span<const double> actual, std::span<const double> lower, std::span<const double> upper,
               double alpha);

/// Linear interpolation between order statistics at position alpha (n - 1). Input need not be sorted.
double empirical_quantile(std::vector<double> values, double alpha);
/// Same on already sorted values.
double sorted_quantile(std::span<const double> sorted, double alpha);

struct AnovaResult {
    double f = 0.0;  ///< +inf when the within-group variance is zero but the means differ
    double p = 1.0;
    double df_between = 0.0;
    double df_within = 0.0;
};

struct PairwiseAnova {
    std::size_t first = 0;
    std::size_t second = 0;
    AnovaResult result;
};

struct AnovaTable {
    AnovaResult overall;
    std::vector<PairwiseAnova> pairwise;
};

/// One-way ANOVA. Throws ContractError unless there are >= 2 groups of >= 2 observations.
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);
/// Overall test plus every pair (i < j).
AnovaTable anova_table(const std::vector<std::vector<double>>& groups);

}  // namespace coherentcast
