#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coherentcast/metrics.hpp"

namespace coherentcast {

/// Metrics of one series under one method.
struct SeriesMetrics {
    std::string series;
    std::string method;
    double mae = 0.0;
    double rmse = 0.0;
    std::map<std::size_t, std::optional<double>> mase;  ///< nullopt when undefined
    std::map<double, double> ql;                        ///< level -> quantile loss
    std::map<double, double> ws;                        ///< confidence -> Winkler score
    double energy = 0.0;                                ///< univariate energy score per step
};

/// Hierarchy-level summary of one method.
struct MethodSummary {
    std::string method;
    double energy_per_step = 0.0;   ///< mean (n+1)-dim energy score over origins and steps
    double energy_flattened = 0.0;  ///< mean (n+1)*horizon-dim energy score over origins
    double max_coherency_gap = 0.0;
    double min_value = 0.0;
    std::size_t observations = 0;
};

struct EvalReport {
    std::vector<std::string> methods;
    std::vector<SeriesMetrics> series;
    std::vector<MethodSummary> summaries;
    std::map<std::string, std::vector<double>> step_energy;  ///< per-step scores feeding the ANOVA
    AnovaTable anova;
};

/// Structured report. An infinite F statistic is written as the string "inf".
std::string report_json(const EvalReport& report);
/// One row per (series, method): series,method,MAE,RMSE,MASE(..),QL(..),WS(..),ES. Undefined MASE is "undefined".
std::string metrics_csv(const EvalReport& report);
/// method_a,method_b,F,p,df_between,df_within; the overall test uses "all" for both methods.
std::string anova_csv(const EvalReport& report);
/// method,energy_per_step,energy_flattened,max_coherency_gap,min_value,observations
std::string summary_csv(const EvalReport& report);

}  // namespace coherentcast
