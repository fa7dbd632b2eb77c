#pragma once

#include <Eigen/Dense>

#include "coherentcast/hierarchy.hpp"
#include "coherentcast/reconciler.hpp"

namespace coherentcast {

/// Product cone K = SOC(1 + D) x {0}^D x (coherent subspace intersected with R_+^D).
struct ConeDescriptor {
    std::size_t soc_dim = 0;
    std::size_t zero_dim = 0;
    std::size_t coherent_dim = 0;
};

/**
 * Conic form  min c^T v  s.t.  b - A v in K  of the reconciliation QP, over the
 * variable v = (eta, xi, x) with xi pinned to x_hat and eta bounding |Q_r (xi - x)|.
 * A and b are affine in (Q_r, x_hat); c is the first unit vector.
 */
struct ConeProblem {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    ConeDescriptor cone;

    std::size_t variable_dim() const noexcept { return static_cast<std::size_t>(c.size()); }
};

ConeProblem assemble_cone(const Eigen::VectorXd& x_hat, const ReconcilerParams& params, const Hierarchy& hierarchy);

/// Variable (eta, xi, x) built from a QP solution: xi = x_hat, eta = |Q_r (x_hat - x)|.
Eigen::VectorXd cone_variable(const QpSolution& solution);

/// Largest violation of b - A v in K (0 when feasible).
double cone_violation(const ConeProblem& problem, const Hierarchy& hierarchy, const Eigen::VectorXd& v);

}  // namespace coherentcast
