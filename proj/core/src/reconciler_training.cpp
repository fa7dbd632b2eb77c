#include "coherentcast/reconciler_training.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <spdlog/spdlog.h>

#include "coherentcast/adam.hpp"
#include "coherentcast/energy_score.hpp"
#include "coherentcast/errors.hpp"
#include "coherentcast/parallel.hpp"
#include "coherentcast/random.hpp"

namespace coherentcast {

namespace {

struct OriginResult {
    double score = 0.0;
    Eigen::MatrixXd gradient;
};

OriginResult origin_score(const ReconcilerParams& params, const Hierarchy& hierarchy, const ReconcileSample& sample,
                          const DclOptions& options, bool with_gradient) {
    const auto& s = sample.scenarios;
    if (s.dimension() != hierarchy.dimension()) throw ContractError("scenario dimension does not match the hierarchy");
    if (static_cast<std::size_t>(sample.actual.rows()) != s.dimension() ||
        static_cast<std::size_t>(sample.actual.cols()) != s.horizon) {
        throw ContractError("actuals do not match the scenario shape");
    }
    const std::size_t m = options.samples == 0 ? s.count : std::min(options.samples, s.count);
    const std::size_t d = s.dimension();
    OriginResult out;
    if (with_gradient) out.gradient = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    std::vector<QpSolution> solutions(m);
    RowMatrix reconciled(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    for (std::size_t t = 0; t < s.horizon; ++t) {
        for (std::size_t i = 0; i < m; ++i) {
            solutions[i] = reconcile(s.vector(i, t), params, hierarchy);
            reconciled.row(static_cast<Eigen::Index>(i)) = solutions[i].x.transpose();
        }
        const Eigen::VectorXd actual = sample.actual.col(static_cast<Eigen::Index>(t));
        RowMatrix grad;
        out.score += energy_score_with_gradient(Tensor::from_matrix(reconciled), std::span(actual.data(), d), options.beta,
                                                with_gradient ? &grad : nullptr);
        if (!with_gradient) continue;
        for (std::size_t i = 0; i < m; ++i) {
            const Eigen::VectorXd up = grad.row(static_cast<Eigen::Index>(i)).transpose();
            if (up.cwiseAbs().maxCoeff() == 0.0) continue;
            out.gradient += dcl_backward(solutions[i], up).d_q_r;
        }
    }
    return out;
}

}  // namespace

double step_energy_score(const RowMatrix& samples, const Eigen::VectorXd& actual, double beta) {
    return energy_score_with_gradient(Tensor::from_matrix(samples), std::span(actual.data(), static_cast<std::size_t>(actual.size())),
                                      beta, nullptr);
}

namespace {

double score_origins(const ReconcilerParams& params, const Hierarchy& hierarchy,
                     const std::vector<const ReconcileSample*>& data, const DclOptions& options,
                     Eigen::MatrixXd* gradient) {
    if (data.empty()) throw ConfigError("no origins to score");
    std::vector<OriginResult> results(data.size());
    parallel_for(data.size(), options.workers, [&](std::size_t o) {
        results[o] = origin_score(params, hierarchy, *data[o], options, gradient != nullptr);
    });
    double total = 0.0;
    const auto d = static_cast<Eigen::Index>(hierarchy.dimension());
    if (gradient) *gradient = Eigen::MatrixXd::Zero(d, d);
    for (const auto& r : results) {
        total += r.score;
        if (gradient) *gradient += r.gradient;
    }
    const double n = static_cast<double>(data.size());
    if (gradient) *gradient /= n;
    return total / n;
}

}  // namespace

double reconciled_score(const ReconcilerParams& params, const Hierarchy& hierarchy,
                        const std::vector<ReconcileSample>& data, const DclOptions& options, Eigen::MatrixXd* gradient) {
    std::vector<const ReconcileSample*> ptrs;
    for (const auto& s : data) ptrs.push_back(&s);
    return score_origins(params, hierarchy, ptrs, options, gradient);
}

ReconcilerArtifact train_reconciler(const std::vector<ReconcileSample>& train, const std::vector<ReconcileSample>& val,
                                    const Hierarchy& hierarchy, const DclOptions& options) {
    if (train.empty()) throw ConfigError("reconciler training partition (dcl_train) is empty");
    if (val.empty()) throw ConfigError("reconciler validation partition (dcl_val) is empty");
    ReconcilerArtifact out;
    out.mode = WeightMode::dcl;
    out.series = train.front().scenarios.series;
    ReconcilerParams params = ReconcilerParams::identity(hierarchy.dimension());
    out.params = params;

    const double init_train = reconciled_score(params, hierarchy, train, options);
    double best_val = reconciled_score(params, hierarchy, val, options);
    out.history.train_score.push_back(init_train);
    out.history.val_score.push_back(best_val);
    out.history.best_epoch = 0;
    spdlog::info("reconciler epoch 0: train {:.6f} val {:.6f}", init_train, best_val);

    ParameterMap tensors{{"q_r", Tensor::from_matrix(Eigen::MatrixXd(params.q_r))}};
    AdamState adam;
    adam.config.learning_rate = options.learning_rate;
    Rng shuffle(derive_seed(options.seed, 0xDC1));
    std::vector<std::size_t> order(train.size());
    const std::size_t batch = options.batch == 0 ? train.size() : options.batch;

    for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        if (batch < train.size()) {
            for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);
        }
        for (std::size_t start = 0; start < order.size(); start += batch) {
            std::vector<const ReconcileSample*> chunk;
            const std::size_t end = std::min(order.size(), start + batch);
            for (std::size_t i = start; i < end; ++i) chunk.push_back(&train[order[i]]);
            Eigen::MatrixXd grad;
            score_origins(params, hierarchy, chunk, options, &grad);
            adam_step(adam, tensors, {{"q_r", Tensor::from_matrix(grad)}});
            params.q_r = tensors.at("q_r").to_matrix();
            params.enforce_invariants();
            tensors["q_r"] = Tensor::from_matrix(Eigen::MatrixXd(params.q_r));
        }
        const double train_score = reconciled_score(params, hierarchy, train, options);
        const double val_score = reconciled_score(params, hierarchy, val, options);
        if (!std::isfinite(train_score) || !std::isfinite(val_score)) {
            throw NumericalError("reconciler training diverged at epoch " + std::to_string(epoch));
        }
        out.history.train_score.push_back(train_score);
        out.history.val_score.push_back(val_score);
        spdlog::info("reconciler epoch {}: train {:.6f} val {:.6f}", epoch, train_score, val_score);
        if (val_score < best_val && train_score <= init_train) {
            best_val = val_score;
            out.params = params;
            out.history.best_epoch = epoch;
        }
    }
    return out;
}

Eigen::MatrixXd forecast_errors(const std::vector<ReconcileSample>& data) {
    if (data.empty()) throw ConfigError("no origins to compute forecast errors from");
    const std::size_t d = data.front().scenarios.dimension();
    std::size_t cols = 0;
    for (const auto& s : data) cols += s.scenarios.horizon;
    Eigen::MatrixXd e(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(cols));
    Eigen::Index c = 0;
    for (const auto& s : data) {
        for (std::size_t t = 0; t < s.scenarios.horizon; ++t, ++c) {
            const RowMatrix step = s.scenarios.step(t);
            e.col(c) = s.actual.col(static_cast<Eigen::Index>(t)) - step.colwise().mean().transpose();
        }
    }
    return e;
}

Eigen::MatrixXd coef_weight(const Eigen::MatrixXd& errors) {
    const Eigen::Index d = errors.rows();
    if (errors.cols() < 2) throw ConfigError("need at least two error vectors for the correlation matrix");
    const Eigen::MatrixXd centered = errors.colwise() - errors.rowwise().mean();
    const Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(errors.cols() - 1);
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            if (i == j) continue;
            const double denom = std::sqrt(cov(i, i) * cov(j, j));
            corr(i, j) = denom > 0.0 ? cov(i, j) / denom : 0.0;
        }
    }
    corr += 1e-6 * Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd inv = corr.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
    return 0.5 * (inv + inv.transpose());
}

ScenarioTensor reconcile_scenarios(const ScenarioTensor& base, const ReconcilerParams& params,
                                   const Hierarchy& hierarchy, std::size_t workers) {
    if (base.dimension() != hierarchy.dimension()) throw ContractError("scenario dimension does not match the hierarchy");
    ScenarioTensor out = base;
    parallel_for(base.count, workers, [&](std::size_t i) {
        for (std::size_t t = 0; t < base.horizon; ++t) {
            const auto sol = reconcile(base.vector(i, t), params, hierarchy);
            for (std::size_t k = 0; k < base.dimension(); ++k) out.at(i, k, t) = sol.x(static_cast<Eigen::Index>(k));
        }
    });
    return out;
}

ScenarioTensor shuffle_pairing(const ScenarioTensor& base, std::uint64_t seed) {
    ScenarioTensor out = base;
    Rng rng(seed);
    std::vector<std::size_t> perm(base.count);
    for (std::size_t k = 0; k < base.dimension(); ++k) {
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        for (std::size_t i = 0; i < base.count; ++i) {
            for (std::size_t t = 0; t < base.horizon; ++t) out.at(i, k, t) = base.at(perm[i], k, t);
        }
    }
    return out;
}

}  // namespace coherentcast
