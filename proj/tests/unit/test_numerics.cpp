#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "coherentcast/activation.hpp"
#include "coherentcast/adam.hpp"
#include "coherentcast/errors.hpp"
#include "coherentcast/finite_diff.hpp"
#include "coherentcast/graph.hpp"
#include "coherentcast/random.hpp"

using namespace coherentcast;

namespace {

Tensor random_tensor(Rng& rng, std::size_t r, std::size_t c, double lo = -2.0, double hi = 2.0) {
    std::vector<double> d(r * c);
    for (auto& v : d) v = rng.uniform(lo, hi);
    return Tensor::matrix(r, c, std::move(d));
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3}); }

}  // namespace

TEST(Tensor, RejectsNonFinite) {
    EXPECT_THROW(Tensor::row({1.0, std::nan("")}), NumericalError);
    EXPECT_THROW(Tensor::row({INFINITY}), NumericalError);
    EXPECT_THROW(Tensor({2, 2}, {1.0, 2.0, 3.0}), ContractError);
}

TEST(Activation, ExampleValues) {
    EXPECT_EQ(eval_activation(Activation::relu, -1.0), 0.0);
    // x * Phi(x) + phi(x) at 0 is phi(0) = 1/sqrt(2 pi)
    EXPECT_NEAR(eval_activation(Activation::gaussian_softplus, 0.0), 0.3989422804014327, 1e-12);
    EXPECT_EQ(eval_activation(Activation::sigmoid, 0.0), 0.5);
    EXPECT_THROW(parse_activation("swish"), ConfigError);
}

TEST(Activation, NormalCdfAccuracy) {
    // Reference values of Phi from high-precision tables.
    EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-15);
    EXPECT_NEAR(normal_cdf(-3.0), 0.0013498980316300946, 1e-15);
    EXPECT_NEAR(normal_cdf(2.5), 0.9937903346742238, 1e-15);
}

TEST(Activation, GaussianSoftplusConvexNonDecreasing) {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        double x[3] = {rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(-6, 6)};
        std::sort(x, x + 3);
        if (x[1] - x[0] < 1e-6 || x[2] - x[1] < 1e-6) continue;
        const double g0 = eval_activation(Activation::gaussian_softplus, x[0]);
        const double g1 = eval_activation(Activation::gaussian_softplus, x[1]);
        const double g2 = eval_activation(Activation::gaussian_softplus, x[2]);
        EXPECT_GE(g1, g0);
        const double s01 = (g1 - g0) / (x[1] - x[0]);
        const double s12 = (g2 - g1) / (x[2] - x[1]);
        EXPECT_GE(s12, s01 - 1e-9);
    }
}

TEST(Activation, GaussianSoftplusApproachesRelu) {
    EXPECT_LE(std::abs(eval_activation(Activation::gaussian_softplus, 20.0) - 20.0), 1e-8);
    EXPECT_LE(std::abs(eval_activation(Activation::gaussian_softplus, -20.0)), 1e-8);
}

TEST(Activation, DerivativesMatchFiniteDifferences) {
    for (const auto kind : {Activation::gaussian_softplus, Activation::sigmoid, Activation::tanh}) {
        for (double x = -3.0; x <= 3.0; x += 0.37) {
            const double h = 1e-5;
            const double d1 = (eval_activation(kind, x + h) - eval_activation(kind, x - h)) / (2 * h);
            const double d2 = (activation_derivative(kind, x + h) - activation_derivative(kind, x - h)) / (2 * h);
            EXPECT_NEAR(activation_derivative(kind, x), d1, 1e-8);
            EXPECT_NEAR(activation_second_derivative(kind, x), d2, 1e-8);
        }
    }
}

TEST(Graph, BackwardExamples) {
    {
        Graph g;
        const Var x = g.parameter("x", Tensor::scalar(3.0));
        const auto grads = g.backward(g.mul(x, x));
        EXPECT_DOUBLE_EQ(grads.at("x").item(), 6.0);
    }
    {
        Graph g;
        const Var x = g.parameter("x", Tensor::scalar(2.0));
        const Var y = g.parameter("y", Tensor::scalar(3.0));
        const auto grads = g.backward(g.mul(x, y));
        EXPECT_DOUBLE_EQ(grads.at("x").item(), 3.0);
        EXPECT_DOUBLE_EQ(grads.at("y").item(), 2.0);
    }
    {
        Graph g;
        const Var x = g.parameter("x", Tensor::scalar(-1.0));
        const auto grads = g.backward(g.activation(Activation::relu, x));
        EXPECT_DOUBLE_EQ(grads.at("x").item(), 0.0);
    }
}

TEST(Graph, BackwardContract) {
    Graph g;
    const Var x = g.parameter("x", Tensor::row({1.0, 2.0}));
    const Var c = g.constant(Tensor::row({1.0, 1.0}));
    EXPECT_THROW(g.backward(g.mul(x, c)), ContractError);
    const Var s = g.sum(g.mul(x, c));
    const auto grads = g.backward(s);
    EXPECT_EQ(grads.size(), 1u);  // constants are skipped
    EXPECT_THROW(g.backward(s), ContractError);
}

// Random composites of the differentiable ops against central differences.
TEST(Graph, RandomCompositesMatchFiniteDifferences) {
    const Activation smooth[] = {Activation::gaussian_softplus, Activation::sigmoid, Activation::tanh};
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const Tensor a0 = random_tensor(rng, 3, 4);
        const Tensor b0 = random_tensor(rng, 4, 3);
        const Tensor c0 = random_tensor(rng, 1, 3);
        const Tensor k0 = random_tensor(rng, 3, 3);
        const std::uint64_t plan_seed = rng.next();
        const std::vector<double> obs{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double beta = rng.uniform(0.5, 1.5);

        auto build = [&](Graph& g, const Tensor& a, const Tensor& b, const Tensor& c, bool trainable) {
            Rng plan(plan_seed);
            const Var va = trainable ? g.parameter("a", a) : g.constant(a);
            const Var vb = trainable ? g.parameter("b", b) : g.constant(b);
            const Var vc = trainable ? g.parameter("c", c) : g.constant(c);
            Var x = g.add_row(g.matmul(va, vb), vc);  // 3 x 3
            const Var k = g.constant(k0);
            for (int step = 0; step < 5; ++step) {
                switch (plan.below(7)) {
                    case 0: x = g.activation(smooth[plan.below(3)], x); break;
                    case 1: x = g.mul(x, g.activation_slope(smooth[plan.below(3)], x)); break;
                    case 2: x = g.scale(x, plan.uniform(-1.5, 1.5)); break;
                    case 3: x = g.sub(g.add_scalar(x, 0.3), k); break;
                    case 4: x = g.matmul(x, g.reshape(g.slice_rows(g.repeat_rows(x, 2), 1, 3), 3, 3)); break;
                    case 5: x = g.slice_cols(g.concat_cols(x, g.mul(x, k)), 1, 3); break;
                    default: x = g.add(x, g.mul(x, x)); break;
                }
            }
            return plan.below(2) == 0 ? g.sum(x) : g.energy_score(x, obs, beta);
        };

        Graph g;
        const auto grads = g.backward(build(g, a0, b0, c0, true));
        auto value_at = [&](int which) {
            return [&, which](const Tensor& t) {
                Graph h;
                const Var out = build(h, which == 0 ? t : a0, which == 1 ? t : b0, which == 2 ? t : c0, false);
                return h.value(out).item();
            };
        };
        const Tensor fd[] = {finite_diff_grad(value_at(0), a0, 1e-6), finite_diff_grad(value_at(1), b0, 1e-6),
                             finite_diff_grad(value_at(2), c0, 1e-6)};
        const char* names[] = {"a", "b", "c"};
        for (int p = 0; p < 3; ++p) {
            const auto& an = grads.at(names[p]).values();
            for (std::size_t i = 0; i < an.size(); ++i) {
                EXPECT_LE(rel_err(an[i], fd[p][i]), 1e-4) << "trial " << trial << " param " << names[p] << " entry " << i;
            }
        }
    }
}

TEST(Adam, ZeroGradientIsFixedPoint) {
    AdamState state;
    ParameterMap params{{"w", Tensor::row({0.5, -1.0})}};
    const ParameterMap before = params;
    for (int i = 0; i < 3; ++i) adam_step(state, params, {{"w", Tensor::zeros({1, 2})}});
    EXPECT_EQ(params.at("w"), before.at("w"));
    EXPECT_EQ(state.first_moment.at("w"), Tensor::zeros({1, 2}));
    EXPECT_EQ(state.second_moment.at("w"), Tensor::zeros({1, 2}));
    EXPECT_EQ(state.step, 3u);
}

TEST(Adam, FirstStepClosedForm) {
    AdamState state;
    ParameterMap params{{"w", Tensor::scalar(0.0)}};
    adam_step(state, params, {{"w", Tensor::scalar(1.0)}});
    // m_hat = 1, v_hat = 1 after bias correction, so the step is -lr / (1 + eps).
    EXPECT_NEAR(params.at("w").item(), -0.001 / (1.0 + 1e-8), 1e-15);
}

TEST(Adam, RepeatedGradientDoesNotGrowStep) {
    AdamState state;
    ParameterMap params{{"w", Tensor::scalar(0.0)}};
    adam_step(state, params, {{"w", Tensor::scalar(0.7)}});
    const double first = params.at("w").item();
    adam_step(state, params, {{"w", Tensor::scalar(0.7)}});
    const double second = params.at("w").item() - first;
    EXPECT_LE(std::abs(second), std::abs(first) + 1e-12);
}

TEST(Adam, ShapeMismatchThrows) {
    AdamState state;
    ParameterMap params{{"w", Tensor::row({1.0, 2.0})}};
    EXPECT_THROW(adam_step(state, params, {{"w", Tensor::scalar(1.0)}}), ContractError);
    EXPECT_THROW(adam_step(state, params, {{"v", Tensor::scalar(1.0)}}), ContractError);
}

TEST(FiniteDiff, Examples) {
    const auto square = [](const Tensor& t) { return t[0] * t[0]; };
    EXPECT_NEAR(finite_diff_grad(square, Tensor::scalar(3.0), 1e-4)[0], 6.0, 1e-6);
    const auto constant = [](const Tensor&) { return 4.2; };
    const auto zero = finite_diff_grad(constant, Tensor::row({1.0, 2.0, 3.0}), 1e-4);
    for (const double v : zero.values()) EXPECT_EQ(v, 0.0);
    const auto abs_fn = [](const Tensor& t) { return std::abs(t[0]); };
    EXPECT_NEAR(finite_diff_grad(abs_fn, Tensor::scalar(1.0), 1e-4)[0], 1.0, 1e-8);
    EXPECT_THROW(finite_diff_grad(square, Tensor::scalar(1.0), 0.0), ContractError);
}
