#include "coherentcast/reconciler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coherentcast/errors.hpp"

namespace coherentcast {

namespace {

constexpr double kWeakTolerance = 1e-8;

void check_factor(const Eigen::MatrixXd& q_r, std::size_t dimension) {
    if (static_cast<std::size_t>(q_r.rows()) != dimension || q_r.rows() != q_r.cols()) {
        throw ContractError("Q_r must be " + std::to_string(dimension) + " x " + std::to_string(dimension));
    }
    for (Eigen::Index i = 0; i < q_r.rows(); ++i) {
        if (!(q_r(i, i) >= kDiagonalFloor)) {
            throw NumericalError("Q_r diagonal entry " + std::to_string(i) + " is below the 1e-6 floor; KKT system is singular");
        }
        for (Eigen::Index j = i + 1; j < q_r.cols(); ++j) {
            if (q_r(i, j) != 0.0) throw NumericalError("Q_r must be lower triangular");
        }
    }
}

bool is_feasible(const Eigen::VectorXd& x, const Hierarchy& h) {
    if ((x.array() < 0.0).any()) return false;
    const auto k = static_cast<Eigen::Index>(h.aggregate_count());
    const Eigen::VectorXd sums = h.summing() * x.tail(static_cast<Eigen::Index>(h.bottom_count()));
    for (Eigen::Index r = 0; r < k; ++r) {
        if (std::abs(x(r) - sums(r)) > 1e-12 * (1.0 + std::abs(x(r)))) return false;
    }
    return true;
}

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& a, const Eigen::VectorXd& c, const std::vector<bool>& passive) {
    std::vector<Eigen::Index> cols;
    for (std::size_t j = 0; j < passive.size(); ++j) {
        if (passive[j]) cols.push_back(static_cast<Eigen::Index>(j));
    }
    Eigen::VectorXd s = Eigen::VectorXd::Zero(a.cols());
    if (cols.empty()) return s;
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = a.col(cols[j]);
    const Eigen::VectorXd sol = sub.colPivHouseholderQr().solve(c);
    for (std::size_t j = 0; j < cols.size(); ++j) s(cols[j]) = sol(static_cast<Eigen::Index>(j));
    return s;
}

}  // namespace

ReconcilerParams ReconcilerParams::identity(std::size_t dimension) {
    const auto d = static_cast<Eigen::Index>(dimension);
    return {Eigen::MatrixXd::Identity(d, d)};
}

ReconcilerParams ReconcilerParams::from_weight(const Eigen::MatrixXd& weight) {
    // Reversing rows and columns turns a Cholesky factor into the lower-triangular R with R^T R = W.
    const auto d = weight.rows();
    const Eigen::MatrixXd reversed = weight.reverse();
    Eigen::LLT<Eigen::MatrixXd> llt(reversed);
    if (llt.info() != Eigen::Success) throw NumericalError("weight matrix is not positive definite");
    const Eigen::MatrixXd l = llt.matrixL();
    ReconcilerParams p{Eigen::MatrixXd(l.transpose().reverse())};
    for (Eigen::Index i = 0; i < d; ++i) {
        if (p.q_r(i, i) < 0.0) p.q_r.row(i) *= -1.0;
    }
    p.enforce_invariants();
    return p;
}

void ReconcilerParams::enforce_invariants() {
    for (Eigen::Index i = 0; i < q_r.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < q_r.cols(); ++j) q_r(i, j) = 0.0;
        q_r(i, i) = std::max(q_r(i, i), kDiagonalFloor);
    }
}

double reconciliation_objective(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x, const ReconcilerParams& params) {
    return (params.q_r * (x_hat - x)).squaredNorm();
}

QpSolution reconcile(const Eigen::VectorXd& x_hat, const ReconcilerParams& params, const Hierarchy& hierarchy) {
    const std::size_t dim = hierarchy.dimension();
    if (static_cast<std::size_t>(x_hat.size()) != dim) throw ContractError("x_hat does not match the hierarchy");
    if (!x_hat.allFinite()) throw NumericalError("x_hat has non-finite entries");
    check_factor(params.q_r, dim);

    const auto k = static_cast<Eigen::Index>(hierarchy.aggregate_count());
    const auto n = static_cast<Eigen::Index>(hierarchy.bottom_count());
    const Eigen::MatrixXd& basis = hierarchy.basis();

    QpSolution sol;
    sol.x_hat = x_hat;
    sol.q_r = params.q_r;
    sol.basis = basis;

    Eigen::VectorXd z;
    if (is_feasible(x_hat, hierarchy)) {
        sol.x = x_hat;
        sol.passthrough = true;
        z = x_hat.tail(n);
    } else {
        // Lawson-Hanson NNLS on min |A z - c|^2 with A = Q_r M, c = Q_r x_hat.
        const Eigen::MatrixXd a = params.q_r * basis;
        const Eigen::VectorXd c = params.q_r * x_hat;
        const double tol = 1e-12 * (1.0 + a.cwiseAbs().maxCoeff() * (1.0 + c.cwiseAbs().maxCoeff()));
        std::vector<bool> passive(static_cast<std::size_t>(n), false);
        z = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd w = a.transpose() * (c - a * z);
        const std::size_t max_iter = 10 * static_cast<std::size_t>(n) + 20;
        std::size_t iter = 0;
        while (true) {
            Eigen::Index best = -1;
            double best_w = tol;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
                    best_w = w(j);
                    best = j;
                }
            }
            if (best < 0) break;
            passive[static_cast<std::size_t>(best)] = true;
            while (true) {
                if (++iter > max_iter) throw NumericalError("active-set iteration did not converge");
                const Eigen::VectorXd s = solve_passive(a, c, passive);
                bool all_positive = true;
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) all_positive = false;
                }
                if (all_positive) {
                    z = s;
                    break;
                }
                double step = 1.0;
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) step = std::min(step, z(j) / (z(j) - s(j)));
                }
                z += step * (s - z);
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (passive[static_cast<std::size_t>(j)] && z(j) <= tol) {
                        passive[static_cast<std::size_t>(j)] = false;
                        z(j) = 0.0;
                    }
                }
            }
            w = a.transpose() * (c - a * z);
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!passive[static_cast<std::size_t>(j)]) z(j) = 0.0;
        }
        sol.x = basis * z;
        sol.iterations = iter;
    }

    const Eigen::MatrixXd weight = params.weight();
    const Eigen::VectorXd residual = weight * (sol.x - x_hat);
    sol.eq_multipliers = -2.0 * residual.head(k);
    sol.ineq_multipliers = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    const Eigen::VectorXd bottom_mult = 2.0 * basis.transpose() * residual;
    for (Eigen::Index j = 0; j < n; ++j) {
        sol.ineq_multipliers(k + j) = z(j) == 0.0 ? std::max(bottom_mult(j), 0.0) : 0.0;
        if (z(j) == 0.0) sol.active.push_back(static_cast<std::size_t>(k + j));
    }
    return sol;
}

DclGradients dcl_backward(const QpSolution& solution, const Eigen::VectorXd& upstream) {
    const auto dim = solution.x.size();
    if (upstream.size() != dim) throw ContractError("upstream gradient does not match the solution");
    const Eigen::MatrixXd& basis = solution.basis;
    const auto n = basis.cols();
    const Eigen::MatrixXd weight = solution.q_r.transpose() * solution.q_r;

    DclGradients out;
    out.d_q_r = Eigen::MatrixXd::Zero(dim, dim);
    out.d_x_hat = Eigen::VectorXd::Zero(dim);
    if (upstream.isZero(0.0)) return out;

    const Eigen::VectorXd z = solution.x.tail(n);
    const Eigen::VectorXd mu = (2.0 * basis.transpose() * weight * (solution.x - solution.x_hat)).cwiseMax(0.0);

    // Residual r(z, mu) = [2 M^T Q (M z - x_hat) - mu ; mu .* z], complementarity rows scaled to unit size.
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    jac.topLeftCorner(n, n) = 2.0 * basis.transpose() * weight * basis;
    jac.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    bool weak = false;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double zj = z(j) > 0.0 ? z(j) : 0.0;
        const double scale = std::max(zj, mu(j));
        if (zj <= kWeakTolerance && mu(j) <= kWeakTolerance) {
            weak = true;
            continue;
        }
        jac(n + j, j) = mu(j) / scale;
        jac(n + j, n + j) = zj / scale;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n);
    rhs.head(n) = basis.transpose() * upstream;

    const Eigen::MatrixXd jt = jac.transpose();
    Eigen::VectorXd adjoint;
    if (weak) {
        adjoint = jt.completeOrthogonalDecomposition().solve(rhs);
    } else {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jt);
        if (!lu.isInvertible()) {
            adjoint = jt.completeOrthogonalDecomposition().solve(rhs);
        } else {
            adjoint = lu.solve(rhs);
        }
    }
    if (!weak && (jt * adjoint - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) {
        throw NumericalError("KKT Jacobian is rank deficient beyond the least-squares fallback");
    }
    const Eigen::VectorXd dz = adjoint.head(n);
    const Eigen::VectorXd direction = basis * dz;

    out.d_x_hat = 2.0 * weight * direction;
    const Eigen::MatrixXd grad_weight = 2.0 * direction * (solution.x_hat - solution.x).transpose();
    out.d_q_r = (solution.q_r * (grad_weight + grad_weight.transpose())).triangularView<Eigen::Lower>();
    return out;
}

}  // namespace coherentcast
