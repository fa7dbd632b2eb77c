#include "coherentcast/energy_score.hpp"

#include <cmath>
#include <string>

#include "coherentcast/errors.hpp"

namespace coherentcast {

namespace {

constexpr double kCoincident = 1e-12;

}  // namespace

void validate(const EnergyScoreConfig& cfg) {
    if (!(cfg.beta > 0.0 && cfg.beta < 2.0)) {
        throw ConfigError("energy score beta must lie in (0, 2), got " + std::to_string(cfg.beta));
    }
}

double energy_score(const Tensor& samples, std::span<const double> observation, const EnergyScoreConfig& cfg) {
    return energy_score_with_gradient(samples, observation, cfg.beta, nullptr);
}

double energy_score_with_gradient(const Tensor& samples, std::span<const double> observation, double beta,
                                  RowMatrix* grad) {
    validate(EnergyScoreConfig{beta});
    const std::size_t m = samples.size() == 0 ? 0 : samples.rows();
    if (m == 0) throw ContractError("energy score needs at least one sample");
    const std::size_t d = samples.cols();
    if (d != observation.size()) {
        throw ContractError("energy score dimension mismatch: samples have " + std::to_string(d) +
                            " columns, observation has " + std::to_string(observation.size()));
    }
    const auto W = samples.as_matrix();
    if (grad) grad->setZero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));

    const double inv_m = 1.0 / static_cast<double>(m);
    const bool unit_beta = beta == 1.0;
    std::vector<double> diff(d);

    double to_obs = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double sq = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            diff[k] = W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) - observation[k];
            sq += diff[k] * diff[k];
        }
        const double dist = std::sqrt(sq);
        to_obs += unit_beta ? dist : std::pow(dist, beta);
        if (grad && dist >= kCoincident) {
            const double coef = inv_m * beta * (unit_beta ? 1.0 / dist : std::pow(dist, beta - 2.0));
            for (std::size_t k = 0; k < d; ++k) (*grad)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) += coef * diff[k];
        }
    }

    // Each unordered pair appears twice in the double sum, so the j > i half carries weight 1/m^2.
    double spread = 0.0;
    const double pair_coef = inv_m * inv_m;
    for (std::size_t i = 0; i < m; ++i) {
        const auto wi = W.row(static_cast<Eigen::Index>(i));
        for (std::size_t j = i + 1; j < m; ++j) {
            const auto wj = W.row(static_cast<Eigen::Index>(j));
            const double dist = (wi - wj).norm();
            spread += unit_beta ? dist : std::pow(dist, beta);
            if (grad && dist >= kCoincident) {
                const double coef = pair_coef * beta * (unit_beta ? 1.0 / dist : std::pow(dist, beta - 2.0));
                const auto delta = (coef * (wi - wj)).eval();
                grad->row(static_cast<Eigen::Index>(i)) -= delta;
                grad->row(static_cast<Eigen::Index>(j)) += delta;
            }
        }
    }
    return inv_m * to_obs - pair_coef * spread;
}

}  // namespace coherentcast
