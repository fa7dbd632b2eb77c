#include <gtest/gtest.h>

#include <cmath>

#include "coherentcast/adam.hpp"
#include "coherentcast/errors.hpp"
#include "coherentcast/finite_diff.hpp"
#include "coherentcast/picnn.hpp"
#include "coherentcast/random.hpp"

using namespace coherentcast;

namespace {

PicnnConfig small_config(std::size_t tau, const std::string& acts, std::size_t ctx = 3, std::size_t hidden = 6) {
    PicnnConfig c;
    c.context_dim = ctx;
    c.tau = tau;
    c.hidden = hidden;
    c.v_activations = parse_activation_string(acts);
    c.layers = c.v_activations.size();
    return c;
}

std::vector<double> uniform_vec(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

// Layer 0 rigged so that v_1 = relu(alpha) = alpha on (0, 1).
PicnnParams identity_network() {
    auto c = small_config(1, "r", 1, 1);
    auto p = PicnnParams::zeros(c);
    p.layers[0].w_a = Tensor::matrix(1, 1, {1.0});
    p.layers[0].b_au = Tensor::matrix(1, 1, {1.0});
    return p;
}

}  // namespace

TEST(Picnn, ActivationStrings) {
    EXPECT_EQ(activation_string(parse_activation_string("rgg")), "rgg");
    EXPECT_THROW(parse_activation_string("rx"), ConfigError);
    auto c = small_config(2, "rg");
    c.v_activations.push_back(Activation::relu);
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_config(2, "rg");
    c.v_activations[1] = Activation::tanh;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Picnn, ConstantNetwork) {
    auto p = PicnnParams::zeros(small_config(3, "rg"));
    const double c = 0.4;
    p.layers[1].b_v = Tensor::filled(p.layers[1].b_v.shape(), c);
    const std::vector<double> h{0.1, 0.2, 0.3};
    const double expected = 6 * eval_activation(Activation::gaussian_softplus, c);
    EXPECT_NEAR(picnn_forward(p, std::vector<double>{0.2, 0.5, 0.9}, h), expected, 1e-14);
    EXPECT_NEAR(picnn_forward(p, std::vector<double>{0.7, 0.1, 0.3}, h), expected, 1e-14);
    for (const double q : quantile(p, std::vector<double>{0.2, 0.5, 0.9}, h)) EXPECT_EQ(q, 0.0);
    const auto set = sample_scenarios(p, h, 50, 3);
    EXPECT_TRUE((set.samples.array() == 0.0).all());
}

TEST(Picnn, RiggedIdentity) {
    const auto p = identity_network();
    const std::vector<double> h{0.0};
    for (const double a : {0.1, 0.37, 0.9}) {
        EXPECT_DOUBLE_EQ(picnn_forward(p, std::vector<double>{a}, h), a);
        EXPECT_DOUBLE_EQ(quantile(p, std::vector<double>{a}, h)[0], 1.0);
    }
}

TEST(Picnn, DomainAndInvariantErrors) {
    auto p = PicnnParams::init(small_config(2, "rg"), 1);
    const std::vector<double> h{0.0, 0.0, 0.0};
    EXPECT_THROW(picnn_forward(p, std::vector<double>{0.0, 0.5}, h), DomainError);
    EXPECT_THROW(quantile(p, std::vector<double>{0.5, 1.0}, h), DomainError);
    auto w = p.layers[0].w_v.values();
    w[0] = -0.1;
    p.layers[0].w_v = Tensor(p.layers[0].w_v.shape(), w);
    EXPECT_THROW(p.check_nonnegative(), InvariantError);
    EXPECT_THROW(picnn_forward(p, std::vector<double>{0.3, 0.5}, h), InvariantError);
}

TEST(Picnn, ProjectWeights) {
    auto p = PicnnParams::init(small_config(2, "rg"), 1);
    auto w = p.layers[0].w_a.values();
    w[0] = -0.3;
    w[1] = 0.7;
    p.layers[0].w_a = Tensor(p.layers[0].w_a.shape(), w);
    auto wu = p.layers[0].w_u.values();
    wu[0] = -0.5;
    p.layers[0].w_u = Tensor(p.layers[0].w_u.shape(), wu);
    const auto once = project_weights(p);
    EXPECT_EQ(once.layers[0].w_a[0], 0.0);
    EXPECT_EQ(once.layers[0].w_a[1], 0.7);
    EXPECT_EQ(once.layers[0].w_u[0], -0.5);
    const auto twice = project_weights(once);
    ParameterMap a, b;
    once.export_to(a, "p.");
    twice.export_to(b, "p.");
    EXPECT_EQ(a, b);
    EXPECT_TRUE(is_nonnegative_parameter("picnn.1.w_v"));
    EXPECT_FALSE(is_nonnegative_parameter("picnn.1.w_vu"));
}

TEST(Picnn, QuantileIsExactGradient) {
    Rng rng(17);
    for (const auto* acts : {"rg", "gg", "grg", "rrgg"}) {
        const auto p = PicnnParams::init(small_config(4, acts), rng.next());
        for (int trial = 0; trial < 10; ++trial) {
            const auto h = uniform_vec(rng, 3, -1, 1);
            const auto alpha = uniform_vec(rng, 4, 0.05, 0.95);
            const auto q = quantile(p, alpha, h);
            const auto fd = finite_diff_grad(
                [&](const Tensor& t) { return picnn_forward(p, t.values(), h); }, Tensor::row(alpha), 1e-6);
            for (std::size_t j = 0; j < 4; ++j) {
                EXPECT_LE(std::abs(q[j] - fd[j]) / std::max({std::abs(q[j]), std::abs(fd[j]), 1e-3}), 1e-6)
                    << acts << " trial " << trial;
            }
        }
    }
}

TEST(Picnn, MidpointConvexityAllActivationStrings) {
    Rng rng(23);
    for (std::size_t len = 2; len <= 4; ++len) {
        for (std::size_t code = 0; code < (1u << len); ++code) {
            std::string acts;
            for (std::size_t b = 0; b < len; ++b) acts.push_back((code >> (len - 1 - b)) & 1 ? 'r' : 'g');
            const auto p = project_weights(PicnnParams::init(small_config(3, acts), rng.next()));
            for (int trial = 0; trial < 200; ++trial) {
                const auto h = uniform_vec(rng, 3, -2, 2);
                const auto a1 = uniform_vec(rng, 3, 0.001, 0.999);
                const auto a2 = uniform_vec(rng, 3, 0.001, 0.999);
                std::vector<double> mid(3);
                for (std::size_t j = 0; j < 3; ++j) mid[j] = 0.5 * (a1[j] + a2[j]);
                const double lhs = picnn_forward(p, mid, h);
                const double rhs = 0.5 * picnn_forward(p, a1, h) + 0.5 * picnn_forward(p, a2, h);
                EXPECT_LE(lhs, rhs + 1e-9) << acts;
            }
        }
    }
}

TEST(Picnn, MonotoneQuantileMap) {
    Rng rng(31);
    const auto p = PicnnParams::init(small_config(4, "rg"), 8);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto h = uniform_vec(rng, 3, -2, 2);
        const auto a1 = uniform_vec(rng, 4, 0.001, 0.999);
        const auto a2 = uniform_vec(rng, 4, 0.001, 0.999);
        const auto q1 = quantile(p, a1, h);
        const auto q2 = quantile(p, a2, h);
        double dot = 0.0;
        for (std::size_t j = 0; j < 4; ++j) dot += (q1[j] - q2[j]) * (a1[j] - a2[j]);
        EXPECT_GE(dot, -1e-8);
    }
}

TEST(Picnn, ScalarQuantileNonDecreasingOnGrid) {
    Rng rng(37);
    const auto p = PicnnParams::init(small_config(1, "rg"), 12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto h = uniform_vec(rng, 3, -2, 2);
        double prev = -INFINITY;
        for (int k = 1; k <= 99; ++k) {
            const double q = quantile(p, std::vector<double>{k / 100.0}, h)[0];
            EXPECT_GE(q, prev);
            prev = q;
        }
    }
}

TEST(Picnn, Scenarios) {
    const auto p = PicnnParams::init(small_config(4, "rg"), 2);
    const std::vector<double> h{0.5, -0.5, 0.1};
    const auto a = sample_scenarios(p, h, 1000, 99);
    const auto b = sample_scenarios(p, h, 1000, 99);
    EXPECT_EQ(a.samples.rows(), 1000);
    EXPECT_EQ(a.samples.cols(), 4);
    EXPECT_TRUE(a.samples == b.samples);
    EXPECT_THROW(sample_scenarios(p, h, 0, 1), ContractError);
    const auto levels = sample_levels(1000, 4, 99);
    for (Eigen::Index i = 0; i < 5; ++i) {
        const std::vector<double> alpha(levels.row(i).data(), levels.row(i).data() + 4);
        const auto q = quantile(p, alpha, h);
        for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(a.samples(i, static_cast<Eigen::Index>(j)), q[j], 1e-14);
    }
}

TEST(Picnn, BatchedGraphMatchesSingleSample) {
    Rng rng(41);
    const auto p = PicnnParams::init(small_config(3, "rg"), 5);
    RowMatrix alpha(4, 3), ctx(4, 3);
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        alpha.data()[i] = rng.uniform(0.05, 0.95);
        ctx.data()[i] = rng.uniform(-1, 1);
    }
    Graph g;
    const auto vars = bind(g, p, false, "picnn.");
    const auto out = forward(g, vars, g.constant(Tensor::from_matrix(alpha)), g.constant(Tensor::from_matrix(ctx)), true);
    for (Eigen::Index i = 0; i < 4; ++i) {
        const std::vector<double> a(alpha.row(i).data(), alpha.row(i).data() + 3);
        const std::vector<double> h(ctx.row(i).data(), ctx.row(i).data() + 3);
        EXPECT_NEAR(g.value(out.f).at(i, 0), picnn_forward(p, a, h), 1e-13);
        const auto q = quantile(p, a, h);
        for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(g.value(out.q).at(i, j), q[j], 1e-13);
    }
}

TEST(Picnn, ParameterGradientsThroughQuantile) {
    Rng rng(43);
    const auto p = PicnnParams::init(small_config(2, "gg", 2, 3), 6);
    const std::vector<double> h{0.3, -0.4};
    const std::vector<double> alpha{0.3, 0.8};
    const std::vector<double> w{1.0, -0.5};
    auto loss_of = [&](const PicnnParams& params) {
        const auto q = quantile(params, alpha, h);
        return w[0] * q[0] + w[1] * q[1];
    };
    Graph g;
    const auto vars = bind(g, p, true, "picnn.");
    const auto out = forward(g, vars, g.constant(Tensor::row(alpha)), g.constant(Tensor::row(h)), true);
    const auto grads = g.backward(g.sum(g.mul(out.q, g.constant(Tensor::row(w)))));
    ParameterMap exported;
    p.export_to(exported, "picnn.");
    for (const auto& [name, value] : exported) {
        const auto fd = finite_diff_grad(
            [&, name = name](const Tensor& t) {
                ParameterMap copy = exported;
                copy.at(name) = t;
                return loss_of(PicnnParams::import_from(copy, "picnn.", p.config));
            },
            value, 1e-6);
        for (std::size_t i = 0; i < fd.size(); ++i) {
            const double an = grads.at(name)[i];
            EXPECT_LE(std::abs(an - fd[i]) / std::max({std::abs(an), std::abs(fd[i]), 1e-4}), 1e-4) << name << i;
        }
    }
}

TEST(Picnn, NonnegativeAfterAdamAndProjection) {
    auto p = PicnnParams::init(small_config(2, "rg"), 9);
    ParameterMap params;
    p.export_to(params, "picnn.");
    AdamState state;
    state.config.learning_rate = 0.5;
    for (int step = 0; step < 5; ++step) {
        GradientMap grads;
        for (const auto& [name, t] : params) grads[name] = Tensor::filled(t.shape(), 1.0);
        adam_step(state, params, grads);
        project_weights(params);
        const auto back = PicnnParams::import_from(params, "picnn.", p.config);
        EXPECT_NO_THROW(back.check_nonnegative());
    }
}
