#include <gtest/gtest.h>

#include <cmath>

#include "coherentcast/energy_score.hpp"
#include "coherentcast/errors.hpp"
#include "coherentcast/finite_diff.hpp"
#include "coherentcast/graph.hpp"
#include "coherentcast/random.hpp"

using namespace coherentcast;

namespace {

// Direct transcription of the plug-in estimator.
double brute_energy(const RowMatrix& w, const std::vector<double>& x, double beta) {
    const auto m = static_cast<double>(w.rows());
    double first = 0.0, second = 0.0;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        double d = 0.0;
        for (Eigen::Index k = 0; k < w.cols(); ++k) d += (w(i, k) - x[k]) * (w(i, k) - x[k]);
        first += std::pow(std::sqrt(d), beta);
        for (Eigen::Index j = 0; j < w.rows(); ++j) {
            double e = 0.0;
            for (Eigen::Index k = 0; k < w.cols(); ++k) e += (w(i, k) - w(j, k)) * (w(i, k) - w(j, k));
            second += std::pow(std::sqrt(e), beta);
        }
    }
    return first / m - second / (2.0 * m * m);
}

RowMatrix normals(Rng& rng, std::size_t m, std::size_t d, double shift) {
    RowMatrix out(m, d);
    for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = rng.normal() + shift;
    return out;
}

}  // namespace

TEST(EnergyScore, Examples) {
    EXPECT_EQ(energy_score(Tensor::row({1.0, 2.0}), std::vector<double>{1.0, 2.0}), 0.0);
    EXPECT_DOUBLE_EQ(energy_score(Tensor::row({4.0, 6.0}), std::vector<double>{1.0, 2.0}), 5.0);
    EXPECT_DOUBLE_EQ(energy_score(Tensor::matrix(2, 1, {0.0, 2.0}), std::vector<double>{1.0}), 0.5);
}

TEST(EnergyScore, Errors) {
    EXPECT_THROW(energy_score(Tensor::row({1.0}), std::vector<double>{1.0}, {2.0}), ConfigError);
    EXPECT_THROW(energy_score(Tensor::row({1.0}), std::vector<double>{1.0}, {0.0}), ConfigError);
    EXPECT_THROW(energy_score(Tensor::zeros({0, 2}), std::vector<double>{1.0, 1.0}), ContractError);
    EXPECT_THROW(energy_score(Tensor::row({1.0}), std::vector<double>{1.0, 2.0}), ContractError);
}

TEST(EnergyScore, MatchesBruteForce) {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng.below(12), d = 1 + rng.below(5);
        const double beta = rng.uniform(0.1, 1.9);
        const RowMatrix w = normals(rng, m, d, 0.0);
        std::vector<double> x(d);
        for (auto& v : x) v = rng.normal();
        const double got = energy_score(Tensor::from_matrix(w), x, {beta});
        EXPECT_NEAR(got, brute_energy(w, x, beta), 1e-10 * std::max(1.0, std::abs(got)));
    }
}

TEST(EnergyScore, TranslationAndHomogeneity) {
    Rng rng(2);
    const RowMatrix w = normals(rng, 10, 3, 0.0);
    const std::vector<double> x{0.3, -0.2, 1.1};
    const double beta = 1.3;
    const double base = energy_score(Tensor::from_matrix(w), x, {beta});
    RowMatrix shifted = w.array() + 2.5;
    std::vector<double> xs{2.8, 2.3, 3.6};
    EXPECT_NEAR(energy_score(Tensor::from_matrix(shifted), xs, {beta}), base, 1e-12);
    const double s = 3.0;
    RowMatrix scaled = w * s;
    std::vector<double> xsc{0.9, -0.6, 3.3};
    EXPECT_NEAR(energy_score(Tensor::from_matrix(scaled), xsc, {beta}), std::pow(s, beta) * base, 1e-10);
}

TEST(EnergyScore, DuplicatedSamples) {
    const RowMatrix w = RowMatrix::Constant(5, 2, 1.5);
    const double got = energy_score(Tensor::from_matrix(w), std::vector<double>{0.0, 0.0}, {1.0});
    EXPECT_NEAR(got, std::sqrt(2.0 * 1.5 * 1.5), 1e-12);
}

TEST(EnergyScore, ProperOnAverage) {
    Rng rng(99);
    double truth = 0.0, shifted = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> x{rng.normal(), rng.normal(), rng.normal()};
        truth += energy_score(Tensor::from_matrix(normals(rng, 200, 3, 0.0)), x);
        shifted += energy_score(Tensor::from_matrix(normals(rng, 200, 3, 0.5)), x);
    }
    EXPECT_LE(truth / 500, shifted / 500);
}

TEST(EnergyScore, GradientMatchesFiniteDifferences) {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 2 + rng.below(6), d = 1 + rng.below(4);
        const double beta = rng.uniform(0.5, 1.8);
        const RowMatrix w = normals(rng, m, d, 0.0);
        std::vector<double> x(d);
        for (auto& v : x) v = rng.normal();
        RowMatrix grad;
        energy_score_with_gradient(Tensor::from_matrix(w), x, beta, &grad);
        const auto fd = finite_diff_grad(
            [&](const Tensor& t) { return energy_score(t, x, {beta}); }, Tensor::from_matrix(w), 1e-6);
        for (std::size_t i = 0; i < fd.size(); ++i) {
            const double an = grad.data()[i];
            EXPECT_LE(std::abs(an - fd[i]) / std::max({std::abs(an), std::abs(fd[i]), 1e-4}), 1e-4);
        }

        Graph g;
        const Var s = g.parameter("w", Tensor::from_matrix(w));
        const auto grads = g.backward(g.energy_score(s, x, beta));
        for (std::size_t i = 0; i < fd.size(); ++i) EXPECT_NEAR(grads.at("w")[i], grad.data()[i], 1e-12);
    }
}

TEST(EnergyScore, CoincidentSamplesHaveZeroSubgradient) {
    RowMatrix grad;
    energy_score_with_gradient(Tensor::matrix(2, 1, {1.0, 1.0}), std::vector<double>{1.0}, 1.0, &grad);
    EXPECT_EQ(grad(0, 0), 0.0);
    EXPECT_EQ(grad(1, 0), 0.0);
}
