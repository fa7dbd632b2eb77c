#pragma once

#include <vector>

#include <Eigen/Dense>

#include "coherentcast/hierarchy.hpp"

namespace coherentcast {

inline constexpr double kDiagonalFloor = 1e-6;

/// Lower-triangular factor of the adjustment weight Q = Q_r^T Q_r.
struct ReconcilerParams {
    Eigen::MatrixXd q_r;

    static ReconcilerParams identity(std::size_t dimension);
    /// Lower-triangular Q_r with Q_r^T Q_r = weight; throws NumericalError unless weight is positive definite.
    static ReconcilerParams from_weight(const Eigen::MatrixXd& weight);

    Eigen::MatrixXd weight() const { return q_r.transpose() * q_r; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(q_r.rows()); }

    /// Zeroes the strict upper triangle and lifts the diagonal to at least kDiagonalFloor.
    void enforce_invariants();
};

/// Result of one reconciliation QP: argmin (x_hat - x)^T Q (x_hat - x) s.t. y = S z, x >= 0.
struct QpSolution {
    Eigen::VectorXd x;                  ///< coherent, nonnegative solution
    std::vector<std::size_t> active;    ///< indices of x held at zero by the working set
    Eigen::VectorXd eq_multipliers;     ///< one per aggregate row of C x = 0
    Eigen::VectorXd ineq_multipliers;   ///< one per entry of x, all >= 0
    std::size_t iterations = 0;

    // Problem data kept for the backward pass.
    Eigen::VectorXd x_hat;
    Eigen::MatrixXd q_r;
    Eigen::MatrixXd basis;
    bool passthrough = false;  ///< x_hat was already feasible and returned unchanged
};

/**
 * @brief Weighted projection of x_hat onto the coherent nonnegative set.
 *
 * Coherent vectors are parameterized as x = M z with M = [S; I]. Because S has
 * 0/1 entries, z >= 0 implies x >= 0, so the problem is a nonnegative least
 * squares in z solved by active-set iteration with a direct solve per working
 * set. Feasible inputs are returned bit-for-bit.
 *
 * Throws NumericalError if Q_r is not lower triangular with diagonal >= kDiagonalFloor.
 */
QpSolution reconcile(const Eigen::VectorXd& x_hat, const ReconcilerParams& params, const Hierarchy& hierarchy);

/// (x_hat - x)^T Q (x_hat - x)
double reconciliation_objective(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x, const ReconcilerParams& params);

struct DclGradients {
    Eigen::MatrixXd d_q_r;     ///< lower triangular
    Eigen::VectorXd d_x_hat;
};

/**
 * @brief Implicit differentiation of the KKT conditions at a solution.
 *
 * Solves the adjoint of the linearized stationarity and complementarity
 * system. Weakly active bounds (value and multiplier both <= 1e-8) make that
 * system singular, in which case the minimum-norm least-squares adjoint is used.
 */
DclGradients dcl_backward(const QpSolution& solution, const Eigen::VectorXd& upstream);

}  // namespace coherentcast
