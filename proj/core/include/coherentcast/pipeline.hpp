#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "coherentcast/config.hpp"
#include "coherentcast/features.hpp"
#include "coherentcast/model.hpp"
#include "coherentcast/reconciler_training.hpp"
#include "coherentcast/report.hpp"
#include "coherentcast/sessions.hpp"
#include "coherentcast/windows.hpp"

namespace coherentcast {

/// Ingested data with windows for every series and the shared chronological partition.
struct Dataset {
    TimeSeriesFrame frame;
    Covariates covariates;
    std::vector<std::vector<FeatureWindow>> windows;  ///< per series, same origins for all
    Partitions<std::size_t> parts;                    ///< indices into each series' window list
};

/// Reads the ingested hourly and covariate files from the output directory and windows them.
Dataset load_dataset(const RunConfig& cfg);

/// Every stride-th entry, starting with the first.
std::vector<std::size_t> strided(const std::vector<std::size_t>& items, std::size_t stride);

/// Paths inside the output directory.
std::string output_path(const RunConfig& cfg, const std::string& relative);
std::string model_path(const RunConfig& cfg, const std::string& series);
std::string reconciler_path(const RunConfig& cfg, WeightMode mode);

/// D x horizon realized values starting at the origin. Throws ContractError past the end of the data.
Eigen::MatrixXd actuals_at(const TimeSeriesFrame& frame, Timestamp origin, std::size_t horizon);

/// Scenario files of a partition ("val" or "test") joined with their actuals.
std::vector<ReconcileSample> load_samples(const RunConfig& cfg, const TimeSeriesFrame& frame, const std::string& partition);

/// Univariate energy score, O(m log m) when beta = 1.
double univariate_energy(std::vector<double> samples, double actual, double beta);

/**
 * @brief Metrics of every method on the same test origins.
 *
 * `methods[j]` names the scenarios in `scenarios[j]` (one tensor per origin).
 * `actuals` holds the matching D x horizon values; `frame` supplies lagged actuals for MASE.
 */
EvalReport evaluate_methods(const RunConfig& cfg, const TimeSeriesFrame& frame, const std::vector<std::string>& methods,
                            const std::vector<std::vector<ScenarioTensor>>& scenarios,
                            const std::vector<Eigen::MatrixXd>& actuals);

/// Activation strings over {g, r} with lengths 2..max_layers, shortest first, then alphabetical.
std::vector<std::string> activation_combinations(std::size_t max_layers);

void cmd_ingest(const RunConfig& cfg, std::ostream& out);
void cmd_train_base(const RunConfig& cfg, std::ostream& out);
void cmd_forecast(const RunConfig& cfg, std::ostream& out);
void cmd_train_reconciler(const RunConfig& cfg, std::ostream& out);
void cmd_evaluate(const RunConfig& cfg, std::ostream& out);
void cmd_sweep_activations(const RunConfig& cfg, std::ostream& out);

}  // namespace coherentcast
