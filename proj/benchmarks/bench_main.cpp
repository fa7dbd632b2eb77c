#include <benchmark/benchmark.h>

#include <vector>

#include "coherentcast/energy_score.hpp"
#include "coherentcast/hierarchy.hpp"
#include "coherentcast/lstm.hpp"
#include "coherentcast/picnn.hpp"
#include "coherentcast/random.hpp"
#include "coherentcast/reconciler.hpp"

using namespace coherentcast;

namespace {

void BM_Reconcile(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto hier = Hierarchy::single_level(n);
    Rng rng(1);
    ReconcilerParams p = ReconcilerParams::identity(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t j = 0; j < i; ++j) p.q_r(i, j) = rng.uniform(-0.3, 0.3);
    }
    std::vector<Eigen::VectorXd> inputs(256, Eigen::VectorXd(n + 1));
    for (auto& x : inputs) {
        for (auto& v : x) v = rng.uniform(-1.0, 4.0);
    }
    std::size_t k = 0;
    for (auto _ : state) benchmark::DoNotOptimize(reconcile(inputs[k++ % inputs.size()], p, hier).x);
}
BENCHMARK(BM_Reconcile)->Arg(3)->Arg(10);

void BM_DclBackward(benchmark::State& state) {
    const auto hier = Hierarchy::single_level(3);
    Eigen::VectorXd x(4);
    x << 5, 1, -1, 2;
    const auto sol = reconcile(x, ReconcilerParams::identity(4), hier);
    const Eigen::VectorXd up = Eigen::VectorXd::Ones(4);
    for (auto _ : state) benchmark::DoNotOptimize(dcl_backward(sol, up).d_q_r);
}
BENCHMARK(BM_DclBackward);

void BM_EnergyScore(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    Rng rng(2);
    std::vector<double> w(m * 4);
    for (auto& v : w) v = rng.normal();
    const Tensor samples = Tensor::matrix(m, 4, w);
    const std::vector<double> obs{0.1, -0.2, 0.3, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(energy_score(samples, obs));
    state.SetComplexityN(static_cast<benchmark::IterationCount>(m));
}
BENCHMARK(BM_EnergyScore)->RangeMultiplier(4)->Range(64, 1024)->Complexity();

void BM_PicnnQuantile(benchmark::State& state) {
    PicnnConfig c;
    c.context_dim = 100;
    c.tau = 24;
    c.hidden = 40;
    c.layers = 2;
    c.v_activations = parse_activation_string("rg");
    const auto p = project_weights(PicnnParams::init(c, 3));
    Rng rng(4);
    std::vector<double> h(100), alpha(24);
    for (auto& v : h) v = rng.uniform(-1, 1);
    for (auto& v : alpha) v = rng.uniform();
    for (auto _ : state) benchmark::DoNotOptimize(quantile(p, alpha, h));
}
BENCHMARK(BM_PicnnQuantile);

void BM_PicnnScenarios(benchmark::State& state) {
    PicnnConfig c;
    c.context_dim = 100;
    c.tau = 24;
    c.hidden = 40;
    c.layers = 2;
    c.v_activations = parse_activation_string("rg");
    const auto p = project_weights(PicnnParams::init(c, 3));
    const std::vector<double> h(100, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(sample_scenarios(p, h, 1000, 5).samples);
}
BENCHMARK(BM_PicnnScenarios)->Unit(benchmark::kMillisecond);

void BM_LstmEncode(benchmark::State& state) {
    const auto params = LstmParams::init(10, 100, 2, 6);
    RowMatrix ctx = RowMatrix::Constant(168, 10, 0.2);
    for (auto _ : state) benchmark::DoNotOptimize(encode(params, ctx));
}
BENCHMARK(BM_LstmEncode)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
