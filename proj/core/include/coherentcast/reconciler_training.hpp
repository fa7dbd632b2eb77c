#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "coherentcast/artifact.hpp"
#include "coherentcast/hierarchy.hpp"
#include "coherentcast/reconciler.hpp"
#include "coherentcast/scenario_io.hpp"

namespace coherentcast {

/// Base scenarios of one origin with the realized values (D x horizon).
struct ReconcileSample {
    ScenarioTensor scenarios;
    Eigen::MatrixXd actual;
};

struct DclOptions {
    double learning_rate = 0.01;
    std::size_t epochs = 50;
    std::size_t samples = 0;  ///< leading scenarios used per origin; 0 uses all
    std::size_t batch = 0;    ///< origins per Adam step; 0 uses all
    double beta = 1.0;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

/// Energy score at step t of m scenarios (rows of `samples`, D columns) against the actual D-vector.
double step_energy_score(const RowMatrix& samples, const Eigen::VectorXd& actual, double beta);

/**
 * @brief Mean over origins of the per-step energy score of reconciled scenarios, summed over the horizon.
 *
 * With `gradient`, also returns d(score)/d(Q_r) through dcl_backward.
 */
double reconciled_score(const ReconcilerParams& params, const Hierarchy& hierarchy,
                        const std::vector<ReconcileSample>& data, const DclOptions& options,
                        Eigen::MatrixXd* gradient = nullptr);

/**
 * @brief Learns Q_r by Adam on the reconciled energy score.
 *
 * Starts from the identity, floors the diagonal after each step and returns
 * the epoch (0 = identity) with the lowest validation score among those whose
 * training score does not exceed the identity's. Throws ConfigError when
 * either partition is empty.
 */
ReconcilerArtifact train_reconciler(const std::vector<ReconcileSample>& train, const std::vector<ReconcileSample>& val,
                                    const Hierarchy& hierarchy, const DclOptions& options);

/// Inverse correlation matrix of base errors (one D-vector per column), ridge 1e-6 added before inversion.
Eigen::MatrixXd coef_weight(const Eigen::MatrixXd& errors);

/// Errors actual - scenario mean of every origin and step, one column each.
Eigen::MatrixXd forecast_errors(const std::vector<ReconcileSample>& data);

/// Every scenario vector of every step reconciled with one Q_r.
ScenarioTensor reconcile_scenarios(const ScenarioTensor& base, const ReconcilerParams& params,
                                   const Hierarchy& hierarchy, std::size_t workers = 1);

/// Copy whose per-series scenario indices are independently permuted (random pairing across series).
ScenarioTensor shuffle_pairing(const ScenarioTensor& base, std::uint64_t seed);

}  // namespace coherentcast
