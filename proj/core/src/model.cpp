#include "coherentcast/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <spdlog/spdlog.h>

#include "coherentcast/adam.hpp"
#include "coherentcast/errors.hpp"
#include "coherentcast/random.hpp"

namespace coherentcast {

namespace {

constexpr const char* kLstmPrefix = "lstm.";
constexpr const char* kPicnnPrefix = "picnn.";
constexpr const char* kMlpPrefix = "mlp.";

// Inputs of one window, scaled once up front.
struct Prepared {
    RowMatrix context;
    std::vector<double> future;
    std::vector<double> target;
    std::vector<double> mlp_input;
};

std::vector<double> mlp_input(const RowMatrix& context, const std::vector<double>& future) {
    std::vector<double> in;
    in.reserve(static_cast<std::size_t>(context.size()) + future.size());
    for (Eigen::Index t = 0; t < context.rows(); ++t) in.push_back(context(t, 0));
    for (Eigen::Index j = 1; j < context.cols(); ++j) in.push_back(context(context.rows() - 1, j));
    in.insert(in.end(), future.begin(), future.end());
    return in;
}

std::vector<Prepared> prepare(const SeriesModel& model, const std::vector<FeatureWindow>& windows) {
    std::vector<Prepared> out;
    out.reserve(windows.size());
    for (const auto& w : windows) {
        Prepared p;
        p.context = scaled_context(model, w);
        p.future = future_block(model, w);
        p.target = scaled_target(model, w);
        if (model.kind == ModelKind::mlp_qr) p.mlp_input = mlp_input(p.context, p.future);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

std::size_t mlp_input_width(const SeriesModel& model) {
    return model.shape.context + model.covariate_count() +
           (model.future_covariates ? model.shape.horizon * kCalendarWidth : 0);
}

namespace {

ParameterMap export_params(const SeriesModel& model) {
    ParameterMap params;
    if (model.kind == ModelKind::lstm_picnn) {
        model.lstm.export_to(params, kLstmPrefix);
        model.picnn.export_to(params, kPicnnPrefix);
    } else {
        model.mlp.export_to(params, kMlpPrefix);
    }
    return params;
}

void import_params(SeriesModel& model, const ParameterMap& params) {
    if (model.kind == ModelKind::lstm_picnn) {
        model.lstm = LstmParams::import_from(params, kLstmPrefix, model.lstm.input_size, model.lstm.hidden_size,
                                             model.lstm.layers.size());
        model.picnn = PicnnParams::import_from(params, kPicnnPrefix, model.picnn.config);
    } else {
        model.mlp = MlpParams::import_from(params, kMlpPrefix, model.mlp.sizes);
    }
}

// Energy-score loss of one batch on a fresh graph; returns the loss and, when requested, gradients.
double picnn_batch(const SeriesModel& model, const std::vector<const Prepared*>& batch, std::size_t samples,
                   double beta, std::uint64_t seed, GradientMap* grads) {
    const bool trainable = grads != nullptr;
    Graph g;
    const auto lstm_vars = bind(g, model.lstm, trainable, kLstmPrefix);
    const auto picnn_vars = bind(g, model.picnn, trainable, kPicnnPrefix);
    std::vector<const RowMatrix*> contexts;
    for (const auto* p : batch) contexts.push_back(&p->context);
    Var u = encode(g, lstm_vars, contexts);
    const std::size_t b = batch.size();
    if (model.future_covariates) {
        const std::size_t width = batch.front()->future.size();
        std::vector<double> fut;
        fut.reserve(b * width);
        for (const auto* p : batch) fut.insert(fut.end(), p->future.begin(), p->future.end());
        u = g.concat_cols(u, g.constant(Tensor::matrix(b, width, std::move(fut))));
    }
    const std::size_t tau = model.picnn.config.tau;
    const Var alpha = g.constant(Tensor::from_matrix(sample_levels(b * samples, tau, seed)));
    const auto out = forward(g, picnn_vars, alpha, g.repeat_rows(u, samples), true);
    Var total{};
    for (std::size_t i = 0; i < b; ++i) {
        const Var es = g.energy_score(g.slice_rows(out.q, i * samples, samples), batch[i]->target, beta);
        total = i == 0 ? es : g.add(total, es);
    }
    const Var loss = g.scale(total, 1.0 / static_cast<double>(b));
    const double value = g.value(loss).item();
    if (grads) *grads = g.backward(loss);
    return value;
}

double mlp_batch(const SeriesModel& model, const std::vector<const Prepared*>& batch, GradientMap* grads) {
    const bool trainable = grads != nullptr;
    const auto levels = mlp_levels();
    const std::size_t tau = model.shape.horizon;
    const std::size_t k = levels.size();
    const std::size_t b = batch.size();
    const std::size_t width = batch.front()->mlp_input.size();
    std::vector<double> in, targets, all_levels;
    in.reserve(b * width);
    targets.reserve(b * tau * k);
    for (const auto* p : batch) {
        in.insert(in.end(), p->mlp_input.begin(), p->mlp_input.end());
        for (std::size_t j = 0; j < tau; ++j) targets.insert(targets.end(), k, p->target[j]);
    }
    for (std::size_t j = 0; j < tau; ++j) all_levels.insert(all_levels.end(), levels.begin(), levels.end());
    Graph g;
    const Var x = g.constant(Tensor::matrix(b, width, std::move(in)));
    const Var pred = mlp_forward(g, model.mlp, trainable, kMlpPrefix, x);
    const Var loss = g.pinball(pred, Tensor::matrix(b, tau * k, std::move(targets)), all_levels);
    const double value = g.value(loss).item();
    if (grads) *grads = g.backward(loss);
    return value;
}

double batch_loss(const SeriesModel& model, const std::vector<const Prepared*>& batch, std::size_t samples,
                  double beta, std::uint64_t seed, GradientMap* grads) {
    return model.kind == ModelKind::lstm_picnn ? picnn_batch(model, batch, samples, beta, seed, grads)
                                               : mlp_batch(model, batch, grads);
}

double score(const SeriesModel& model, const std::vector<Prepared>& data, const TrainOptions& options) {
    if (data.empty()) throw ConfigError("validation partition is empty");
    double total = 0.0;
    const std::uint64_t seed = derive_seed(options.seed, 0xBA1);
    for (std::size_t start = 0; start < data.size(); start += options.batch_size) {
        const std::size_t end = std::min(data.size(), start + options.batch_size);
        std::vector<const Prepared*> batch;
        for (std::size_t i = start; i < end; ++i) batch.push_back(&data[i]);
        total += batch_loss(model, batch, options.val_samples, options.beta, derive_seed(seed, start), nullptr) *
                 static_cast<double>(batch.size());
    }
    return total / static_cast<double>(data.size());
}

}  // namespace

std::size_t SeriesModel::context_width() const {
    return lstm.hidden_size + (future_covariates ? shape.horizon * kCalendarWidth : 0);
}

TrainOptions TrainOptions::from(const RunConfig& cfg) {
    TrainOptions o;
    o.batch_size = cfg.batch_size;
    o.learning_rate = cfg.learning_rate;
    o.max_epochs = cfg.max_epochs;
    o.patience = cfg.patience;
    o.train_samples = cfg.train_samples;
    o.val_samples = cfg.val_samples;
    o.beta = cfg.beta;
    o.seed = cfg.seed;
    return o;
}

SeriesModel prepare_model(const std::string& series, const RunConfig& cfg, const std::vector<double>& target,
                          const Covariates& covariates, std::size_t train_length) {
    if (covariates.length() != target.size()) throw ContractError("covariates and target differ in length");
    train_length = std::min(train_length, target.size());
    if (train_length == 0) throw ConfigError("training partition is empty");
    SeriesModel m;
    m.series = series;
    m.kind = cfg.model;
    m.shape = cfg.window_shape();
    m.future_covariates = cfg.future_covariates;
    m.target = MinMaxScaler::fit({target.begin(), target.begin() + static_cast<std::ptrdiff_t>(train_length)});
    for (std::size_t j = 0; j < covariates.width(); ++j) {
        std::vector<double> col(train_length);
        for (std::size_t t = 0; t < train_length; ++t) col[t] = covariates.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
        m.covariates.push_back(MinMaxScaler::fit(col));
    }
    return m;
}

void init_lstm_picnn(SeriesModel& model, const RunConfig& cfg, const std::string& activations, std::uint64_t seed) {
    model.kind = ModelKind::lstm_picnn;
    model.lstm = LstmParams::init(1 + model.covariate_count(), cfg.lstm_hidden, cfg.lstm_layers, derive_seed(seed, 1));
    PicnnConfig pc;
    pc.context_dim = model.context_width();
    pc.tau = model.shape.horizon;
    pc.hidden = cfg.picnn_hidden;
    pc.v_activations = parse_activation_string(activations);
    pc.layers = pc.v_activations.size();
    pc.u_activation = parse_activation(cfg.u_activation);
    model.picnn = PicnnParams::init(pc, derive_seed(seed, 2));
}

RowMatrix scaled_context(const SeriesModel& model, const FeatureWindow& window) {
    const auto cols = static_cast<std::size_t>(window.context.cols());
    if (cols != 1 + model.covariate_count()) throw ContractError("window has a different covariate count than the model");
    RowMatrix out(window.context.rows(), window.context.cols());
    for (Eigen::Index t = 0; t < window.context.rows(); ++t) {
        out(t, 0) = model.target.scale(window.context(t, 0));
        for (std::size_t j = 1; j < cols; ++j) {
            out(t, static_cast<Eigen::Index>(j)) = model.covariates[j - 1].scale(window.context(t, static_cast<Eigen::Index>(j)));
        }
    }
    return out;
}

std::vector<double> future_block(const SeriesModel& model, const FeatureWindow& window) {
    if (!model.future_covariates) return {};
    return {window.future.data(), window.future.data() + window.future.size()};
}

std::vector<double> scaled_target(const SeriesModel& model, const FeatureWindow& window) {
    std::vector<double> out(window.target.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = model.target.scale(window.target[j]);
    return out;
}

std::vector<double> picnn_context(const SeriesModel& model, const FeatureWindow& window) {
    auto h = encode(model.lstm, scaled_context(model, window));
    const auto fut = future_block(model, window);
    h.insert(h.end(), fut.begin(), fut.end());
    return h;
}

double validation_score(const SeriesModel& model, const std::vector<FeatureWindow>& val, const TrainOptions& options) {
    return score(model, prepare(model, val), options);
}

void train_model(SeriesModel& model, const std::vector<FeatureWindow>& train, const std::vector<FeatureWindow>& val,
                 const TrainOptions& options) {
    if (train.empty()) throw ConfigError("training partition is empty");
    if (val.empty()) throw ConfigError("validation partition is empty");
    const auto train_data = prepare(model, train);
    const auto val_data = prepare(model, val);

    ParameterMap params = export_params(model);
    ParameterMap best = params;
    AdamState adam;
    adam.config.learning_rate = options.learning_rate;
    model.history = {};
    double best_score = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;
    Rng shuffle(derive_seed(options.seed, 0x5AFF));
    std::vector<std::size_t> order(train_data.size());

    for (std::size_t epoch = 1; epoch <= options.max_epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);
        double epoch_loss = 0.0;
        try {
            for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
                const std::size_t end = std::min(order.size(), start + options.batch_size);
                std::vector<const Prepared*> batch;
                for (std::size_t i = start; i < end; ++i) batch.push_back(&train_data[order[i]]);
                GradientMap grads;
                const std::uint64_t seed = derive_seed(derive_seed(options.seed, epoch), start);
                const double loss = batch_loss(model, batch, options.train_samples, options.beta, seed, &grads);
                epoch_loss += loss * static_cast<double>(batch.size());
                adam_step(adam, params, grads);
                if (model.kind == ModelKind::lstm_picnn) project_weights(params);
                import_params(model, params);
            }
        } catch (const NumericalError& e) {
            throw NumericalError("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
        }
        epoch_loss /= static_cast<double>(train_data.size());
        double val_score = 0.0;
        try {
            val_score = score(model, val_data, options);
        } catch (const NumericalError& e) {
            throw NumericalError("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
        }
        if (!std::isfinite(epoch_loss)) throw NumericalError("training diverged at epoch " + std::to_string(epoch));
        model.history.train_loss.push_back(epoch_loss);
        model.history.val_loss.push_back(val_score);
        spdlog::debug("{} epoch {}: train {:.6f} val {:.6f}", model.series, epoch, epoch_loss, val_score);
        if (val_score < best_score) {
            best_score = val_score;
            best = params;
            model.history.best_epoch = epoch;
            since_best = 0;
        } else if (options.patience > 0 && ++since_best >= options.patience) {
            break;
        }
    }
    import_params(model, best);
}

SeriesModel train_mlp_grid(const SeriesModel& prepared, const RunConfig& cfg, const std::vector<FeatureWindow>& train,
                           const std::vector<FeatureWindow>& val, const TrainOptions& options) {
    SeriesModel best;
    double best_score = std::numeric_limits<double>::infinity();
    std::uint64_t candidate = 0;
    for (const auto depth : cfg.mlp_depths) {
        for (const auto width : cfg.mlp_widths) {
            SeriesModel m = prepared;
            m.kind = ModelKind::mlp_qr;
            std::vector<std::size_t> sizes{mlp_input_width(m)};
            sizes.insert(sizes.end(), depth, width);
            sizes.push_back(m.shape.horizon * mlp_levels().size());
            m.mlp = MlpParams::init(sizes, derive_seed(options.seed, 0x3100 + candidate++));
            train_model(m, train, val, options);
            const double s = m.history.val_loss[m.history.best_epoch - 1];
            spdlog::info("{} mlp depth {} width {}: validation {:.6f}", m.series, depth, width, s);
            if (s < best_score) {
                best_score = s;
                best = std::move(m);
            }
        }
    }
    return best;
}

RowMatrix forecast_scenarios(const SeriesModel& model, const FeatureWindow& window, std::size_t m, std::uint64_t seed) {
    if (m == 0) throw ContractError("scenario count must be at least 1");
    const std::size_t tau = model.shape.horizon;
    RowMatrix out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(tau));
    if (model.kind == ModelKind::lstm_picnn) {
        const auto h = picnn_context(model, window);
        out = sample_scenarios(model.picnn, h, m, seed).samples;
    } else {
        const auto ctx = scaled_context(model, window);
        const auto pred = mlp_forward(model.mlp, mlp_input(ctx, future_block(model, window)));
        const auto levels = mlp_levels();
        const std::size_t k = levels.size();
        const RowMatrix u = sample_levels(m, tau, seed);
        for (std::size_t j = 0; j < tau; ++j) {
            const std::vector<double> curve(pred.begin() + static_cast<std::ptrdiff_t>(j * k),
                                            pred.begin() + static_cast<std::ptrdiff_t>((j + 1) * k));
            for (std::size_t i = 0; i < m; ++i) {
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    interpolate_quantile(curve, levels, u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            }
        }
    }
    for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = model.target.unscale(out.data()[i]);
    return out;
}

std::vector<double> conditional_cdf(const SeriesModel& model, const FeatureWindow& window,
                                    const std::vector<double>& alphas) {
    if (model.kind != ModelKind::lstm_picnn) throw ContractError("conditional CDF needs an LSTM+PICNN model");
    const auto h = picnn_context(model, window);
    std::vector<double> out;
    for (const double a : alphas) {
        const std::vector<double> level(model.shape.horizon, a);
        out.push_back(quantile(model.picnn, level, h)[0]);
    }
    return out;
}

}  // namespace coherentcast
