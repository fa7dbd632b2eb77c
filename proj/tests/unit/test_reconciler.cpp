#include <gtest/gtest.h>

#include <cmath>

#include "coherentcast/cone.hpp"
#include "coherentcast/errors.hpp"
#include "coherentcast/hierarchy.hpp"
#include "coherentcast/random.hpp"
#include "coherentcast/reconciler.hpp"

using namespace coherentcast;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const double x : v) out(i++) = x;
    return out;
}

ReconcilerParams random_params(Rng& rng, std::size_t d) {
    ReconcilerParams p{Eigen::MatrixXd::Zero(d, d)};
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) p.q_r(i, j) = i == j ? rng.uniform(0.5, 2.0) : rng.uniform(-0.5, 0.5);
    }
    return p;
}

Eigen::VectorXd random_x_hat(Rng& rng, std::size_t d) {
    Eigen::VectorXd x(d);
    for (auto& v : x) v = rng.uniform(-2.0, 4.0);
    return x;
}

// Exhaustive search over z on a grid with both components in [0, hi].
Eigen::VectorXd grid_oracle(const Eigen::VectorXd& x_hat, double hi, int steps) {
    const Hierarchy hier = Hierarchy::single_level(2);
    double best = INFINITY;
    Eigen::VectorXd arg;
    for (int a = 0; a <= steps; ++a) {
        for (int b = 0; b <= steps; ++b) {
            const Eigen::VectorXd x = hier.expand(vec({hi * a / steps, hi * b / steps}));
            const double obj = (x_hat - x).squaredNorm();
            if (obj < best) {
                best = obj;
                arg = x;
            }
        }
    }
    return arg;
}

// Instance where every bound is clearly active or clearly inactive, so the
// active set stays fixed under small perturbations.
bool non_degenerate(const QpSolution& s, double margin) {
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
        if (s.x(i) < margin && s.ineq_multipliers(i) < margin) return false;
    }
    return true;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3}); }

}  // namespace

TEST(Hierarchy, Structure) {
    const auto h = Hierarchy::single_level(3);
    EXPECT_EQ(h.dimension(), 4u);
    EXPECT_EQ(h.basis().rows(), 4);
    EXPECT_EQ(h.basis().cols(), 3);
    EXPECT_EQ(h.coherency_gap(vec({6, 1, 2, 3})), 0.0);
    EXPECT_EQ(h.coherency_gap(vec({5, 1, 2, 3})), 1.0);
    Eigen::MatrixXd bad(1, 2);
    bad << 1, 0.5;
    EXPECT_THROW(Hierarchy{bad}, ConfigError);
    Eigen::MatrixXd zero_row = Eigen::MatrixXd::Zero(1, 2);
    EXPECT_THROW(Hierarchy{zero_row}, ConfigError);
}

TEST(Reconcile, FeasibleInputReturnedExactly) {
    const auto hier = Hierarchy::single_level(2);
    Rng rng(1);
    const Eigen::VectorXd x_hat = vec({2, 1, 1});
    for (int i = 0; i < 10; ++i) {
        const auto sol = reconcile(x_hat, random_params(rng, 3), hier);
        EXPECT_TRUE(sol.x == x_hat);
        EXPECT_TRUE(sol.passthrough);
    }
}

TEST(Reconcile, OrthogonalProjection) {
    const auto hier = Hierarchy::single_level(2);
    const Eigen::VectorXd x_hat = vec({3, 1, 1});
    const auto sol = reconcile(x_hat, ReconcilerParams::identity(3), hier);
    EXPECT_NEAR(sol.x(0), 8.0 / 3.0, 1e-12);
    EXPECT_NEAR(sol.x(1), 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(sol.x(2), 4.0 / 3.0, 1e-12);
    const auto oracle = grid_oracle(x_hat, 3.0, 1800);
    EXPECT_LE((sol.x - oracle).cwiseAbs().maxCoeff(), 2.0 * 3.0 / 1800);
    EXPECT_LE(reconciliation_objective(x_hat, sol.x, ReconcilerParams::identity(3)),
              reconciliation_objective(x_hat, oracle, ReconcilerParams::identity(3)) + 1e-12);
}

TEST(Reconcile, BoundActive) {
    const auto hier = Hierarchy::single_level(2);
    const Eigen::VectorXd x_hat = vec({0, -3, 1});
    const auto sol = reconcile(x_hat, ReconcilerParams::identity(3), hier);
    EXPECT_NEAR(sol.x(0), 0.5, 1e-12);
    EXPECT_NEAR(sol.x(1), 0.0, 1e-12);
    EXPECT_NEAR(sol.x(2), 0.5, 1e-12);
    ASSERT_EQ(sol.active.size(), 1u);
    EXPECT_EQ(sol.active[0], 1u);
    const auto oracle = grid_oracle(x_hat, 2.0, 2000);
    EXPECT_LE((sol.x - oracle).cwiseAbs().maxCoeff(), 2.0 * 2.0 / 2000);
}

TEST(Reconcile, AllNonPositiveInput) {
    const auto hier = Hierarchy::single_level(3);
    const auto sol = reconcile(vec({-1, -2, -0.5, -3}), ReconcilerParams::identity(4), hier);
    EXPECT_LE(sol.x.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Reconcile, RejectsBadFactor) {
    const auto hier = Hierarchy::single_level(2);
    ReconcilerParams p = ReconcilerParams::identity(3);
    p.q_r(1, 1) = 1e-7;
    try {
        reconcile(vec({3, 1, 1}), p, hier);
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("1e-6 floor"), std::string::npos);
    }
    p = ReconcilerParams::identity(3);
    p.q_r(0, 2) = 0.5;
    EXPECT_THROW(reconcile(vec({3, 1, 1}), p, hier), NumericalError);
}

TEST(Reconcile, InvariantsOnRandomInstances) {
    Rng rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(4);
        const auto hier = Hierarchy::single_level(n);
        const auto params = random_params(rng, n + 1);
        const auto x_hat = random_x_hat(rng, n + 1);
        const auto sol = reconcile(x_hat, params, hier);
        EXPECT_LE(hier.coherency_gap(sol.x), 1e-8);
        EXPECT_GE(sol.x.minCoeff(), -1e-10);
        EXPECT_GE(sol.ineq_multipliers.minCoeff(), 0.0);
        for (Eigen::Index i = 0; i < sol.x.size(); ++i) EXPECT_LE(std::abs(sol.x(i) * sol.ineq_multipliers(i)), 1e-8);
        // Stationarity: 2 Q (x - x_hat) + C^T lambda - mu = 0.
        const Eigen::VectorXd station = 2.0 * params.weight() * (sol.x - x_hat) +
                                        hier.constraints().transpose() * sol.eq_multipliers - sol.ineq_multipliers;
        EXPECT_LE(station.cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, x_hat.cwiseAbs().maxCoeff()));
        const auto again = reconcile(sol.x, params, hier);
        EXPECT_LE((again.x - sol.x).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Reconcile, BeatsRandomFeasiblePoints) {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(4);
        const auto hier = Hierarchy::single_level(n);
        const auto params = random_params(rng, n + 1);
        const auto x_hat = random_x_hat(rng, n + 1);
        const auto sol = reconcile(x_hat, params, hier);
        const double best = reconciliation_objective(x_hat, sol.x, params);
        for (int k = 0; k < 10000; ++k) {
            Eigen::VectorXd z(n);
            for (auto& v : z) v = rng.uniform() < 0.2 ? 0.0 : rng.uniform(0.0, 4.0);
            EXPECT_LE(best, reconciliation_objective(x_hat, hier.expand(z), params) + 1e-9);
        }
    }
}

TEST(Cone, LayoutAndAffinity) {
    const auto hier = Hierarchy::single_level(2);
    const auto params = ReconcilerParams::identity(3);
    const auto p1 = assemble_cone(vec({3, 1, 1}), params, hier);
    EXPECT_EQ(p1.variable_dim(), 7u);
    EXPECT_EQ(p1.c, (Eigen::VectorXd::Unit(7, 0)));
    EXPECT_EQ(p1.cone.soc_dim, 4u);
    EXPECT_EQ(p1.cone.zero_dim, 3u);
    EXPECT_EQ(p1.cone.coherent_dim, 3u);
    const auto p2 = assemble_cone(vec({6, 2, 2}), params, hier);
    EXPECT_TRUE(p1.a == p2.a);
    EXPECT_TRUE(p1.c == p2.c);
    const Eigen::VectorXd diff = p2.b - p1.b;
    for (Eigen::Index i = 0; i < diff.size(); ++i) {
        const bool in_block = i >= 4 && i < 7;
        if (in_block) {
            EXPECT_EQ(p2.b(i), 2.0 * p1.b(i));
            EXPECT_NE(p1.b(i), 0.0);
        } else {
            EXPECT_EQ(diff(i), 0.0);
        }
    }
}

TEST(Cone, SolutionFeasibleWithMatchingObjective) {
    Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(4);
        const auto hier = Hierarchy::single_level(n);
        const auto params = random_params(rng, n + 1);
        const auto x_hat = random_x_hat(rng, n + 1);
        const auto sol = reconcile(x_hat, params, hier);
        const auto cone = assemble_cone(x_hat, params, hier);
        const auto v = cone_variable(sol);
        EXPECT_LE(cone_violation(cone, hier, v), 1e-7);
        EXPECT_NEAR(cone.c.dot(v), (params.q_r * (x_hat - sol.x)).norm(), 1e-7);
        // Any coherent point with a smaller eta is infeasible.
        Eigen::VectorXd shrunk = v;
        shrunk(0) -= 1e-3;
        if (v(0) > 1e-3) {
            EXPECT_GT(cone_violation(cone, hier, shrunk), 0.0);
        }
    }
}

TEST(DclBackward, ZeroUpstream) {
    const auto hier = Hierarchy::single_level(2);
    const auto sol = reconcile(vec({0, -3, 1}), ReconcilerParams::identity(3), hier);
    const auto g = dcl_backward(sol, Eigen::VectorXd::Zero(3));
    EXPECT_EQ(g.d_q_r.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g.d_x_hat.cwiseAbs().maxCoeff(), 0.0);
}

TEST(DclBackward, ProjectorWithIdentityWeight) {
    const auto hier = Hierarchy::single_level(3);
    const Eigen::VectorXd x_hat = vec({7, 1, 2, 1.5});
    const auto sol = reconcile(x_hat, ReconcilerParams::identity(4), hier);
    ASSERT_TRUE(sol.active.empty());
    const Eigen::MatrixXd& m = hier.basis();
    const Eigen::MatrixXd proj = m * (m.transpose() * m).inverse() * m.transpose();
    const Eigen::VectorXd up = vec({0.3, -1.0, 2.0, 0.5});
    const auto g = dcl_backward(sol, up);
    EXPECT_LE((g.d_x_hat - proj.transpose() * up).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DclBackward, MatchesFiniteDifferences) {
    Rng rng(29);
    int checked = 0;
    while (checked < 100) {
        const std::size_t n = 2 + rng.below(4);
        const auto hier = Hierarchy::single_level(n);
        const auto params = random_params(rng, n + 1);
        const auto x_hat = random_x_hat(rng, n + 1);
        const auto sol = reconcile(x_hat, params, hier);
        if (!non_degenerate(sol, 1e-3)) continue;
        ++checked;
        Eigen::VectorXd up(n + 1);
        for (auto& v : up) v = rng.uniform(-1, 1);
        const auto g = dcl_backward(sol, up);
        const double eps = 1e-6;
        auto loss = [&](const Eigen::VectorXd& xh, const ReconcilerParams& p) { return up.dot(reconcile(xh, p, hier).x); };
        for (std::size_t i = 0; i <= n; ++i) {
            Eigen::VectorXd plus = x_hat, minus = x_hat;
            plus(i) += eps;
            minus(i) -= eps;
            const double fd = (loss(plus, params) - loss(minus, params)) / (2 * eps);
            EXPECT_LE(rel_err(g.d_x_hat(i), fd), 1e-3) << "x_hat " << i;
        }
        for (std::size_t r = 0; r <= n; ++r) {
            for (std::size_t c = 0; c <= r; ++c) {
                ReconcilerParams plus = params, minus = params;
                plus.q_r(r, c) += eps;
                minus.q_r(r, c) -= eps;
                const double fd = (loss(x_hat, plus) - loss(x_hat, minus)) / (2 * eps);
                EXPECT_LE(rel_err(g.d_q_r(r, c), fd), 1e-3) << "q_r " << r << "," << c;
            }
        }
        for (std::size_t r = 0; r <= n; ++r) {
            for (std::size_t c = r + 1; c <= n; ++c) EXPECT_EQ(g.d_q_r(r, c), 0.0);
        }
    }
}

TEST(DclBackward, WeaklyActiveUsesLeastSquares) {
    const auto hier = Hierarchy::single_level(2);
    // z_1 lands exactly on its bound with a zero multiplier.
    const Eigen::VectorXd x_hat = vec({1, 0, 1});
    const auto sol = reconcile(x_hat, ReconcilerParams::identity(3), hier);
    const auto g = dcl_backward(sol, vec({1, 1, 1}));
    EXPECT_TRUE(g.d_x_hat.allFinite());
    EXPECT_TRUE(g.d_q_r.allFinite());
}

TEST(ReconcilerParams, FromWeightRoundTrip) {
    Rng rng(3);
    const auto p = random_params(rng, 4);
    const auto back = ReconcilerParams::from_weight(p.weight());
    EXPECT_LE((back.weight() - p.weight()).cwiseAbs().maxCoeff(), 1e-10);
    for (Eigen::Index i = 0; i < 4; ++i) {
        EXPECT_GT(back.q_r(i, i), 0.0);
        for (Eigen::Index j = i + 1; j < 4; ++j) EXPECT_EQ(back.q_r(i, j), 0.0);
    }
    EXPECT_THROW(ReconcilerParams::from_weight(-Eigen::MatrixXd::Identity(3, 3)), NumericalError);
    ReconcilerParams floored = ReconcilerParams::identity(2);
    floored.q_r(0, 0) = -1.0;
    floored.q_r(0, 1) = 3.0;
    floored.enforce_invariants();
    EXPECT_EQ(floored.q_r(0, 0), kDiagonalFloor);
    EXPECT_EQ(floored.q_r(0, 1), 0.0);
}
