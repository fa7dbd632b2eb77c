#pragma once

#include <span>
#include <vector>

#include "coherentcast/tensor.hpp"

namespace coherentcast {

struct EnergyScoreConfig {
    double beta = 1.0;  ///< exponent, strictly inside (0, 2)
};

/// Throws ConfigError unless 0 < beta < 2.
void validate(const EnergyScoreConfig& cfg);

/**
 * @brief All-pairs plug-in energy score.
 *
 *   ES = (1/m) sum_i |w_i - x|^beta - 1/(2 m^2) sum_i sum_j |w_i - w_j|^beta
 *
 * samples is m x d (one sample per row), observation has length d.
 * m = 0 or a length mismatch throws ContractError; beta outside (0,2) throws ConfigError.
 */
double energy_score(const Tensor& samples, std::span<const double> observation, const EnergyScoreConfig& cfg = {});

/// Same score, optionally writing d(score)/d(samples) into `grad` (m x d).
/// Distances below 1e-12 contribute a zero subgradient.
double energy_score_with_gradient(const Tensor& samples, std::span<const double> observation, double beta,
                                  RowMatrix* grad);

}  // namespace coherentcast
