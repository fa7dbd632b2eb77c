#include "coherentcast/cone.hpp"

#include <algorithm>

#include "coherentcast/errors.hpp"

namespace coherentcast {

ConeProblem assemble_cone(const Eigen::VectorXd& x_hat, const ReconcilerParams& params, const Hierarchy& hierarchy) {
    const auto d = static_cast<Eigen::Index>(hierarchy.dimension());
    if (x_hat.size() != d || params.q_r.rows() != d) throw ContractError("cone data does not match the hierarchy");
    const Eigen::Index vars = 1 + 2 * d;
    const Eigen::Index rows = 1 + 3 * d;

    ConeProblem p;
    p.cone = {static_cast<std::size_t>(1 + d), static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
    p.a = Eigen::MatrixXd::Zero(rows, vars);
    p.b = Eigen::VectorXd::Zero(rows);
    p.c = Eigen::VectorXd::Zero(vars);
    p.c(0) = 1.0;

    // Second-order cone block: (eta, Q_r (xi - x)).
    p.a(0, 0) = -1.0;
    p.a.block(1, 1, d, d) = -params.q_r;
    p.a.block(1, 1 + d, d, d) = params.q_r;
    // Zero cone block: xi - x_hat = 0.
    p.a.block(1 + d, 1, d, d) = -Eigen::MatrixXd::Identity(d, d);
    p.b.segment(1 + d, d) = -x_hat;
    // Coherent nonnegative block: x.
    p.a.block(1 + 2 * d, 1 + d, d, d) = -Eigen::MatrixXd::Identity(d, d);
    return p;
}

Eigen::VectorXd cone_variable(const QpSolution& solution) {
    const auto d = solution.x.size();
    Eigen::VectorXd v(1 + 2 * d);
    v(0) = (solution.q_r * (solution.x_hat - solution.x)).norm();
    v.segment(1, d) = solution.x_hat;
    v.segment(1 + d, d) = solution.x;
    return v;
}

double cone_violation(const ConeProblem& problem, const Hierarchy& hierarchy, const Eigen::VectorXd& v) {
    if (v.size() != problem.a.cols()) throw ContractError("cone variable has the wrong dimension");
    const Eigen::VectorXd s = problem.b - problem.a * v;
    const auto soc = static_cast<Eigen::Index>(problem.cone.soc_dim);
    const auto zero = static_cast<Eigen::Index>(problem.cone.zero_dim);
    const auto coh = static_cast<Eigen::Index>(problem.cone.coherent_dim);

    double violation = std::max(0.0, s.segment(1, soc - 1).norm() - s(0));
    violation = std::max(violation, s.segment(soc, zero).cwiseAbs().maxCoeff());
    const Eigen::VectorXd x = s.segment(soc + zero, coh);
    violation = std::max(violation, std::max(0.0, -x.minCoeff()));
    violation = std::max(violation, hierarchy.coherency_gap(x));
    return violation;
}

}  // namespace coherentcast
