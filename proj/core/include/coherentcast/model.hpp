#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "coherentcast/config.hpp"
#include "coherentcast/features.hpp"
#include "coherentcast/lstm.hpp"
#include "coherentcast/mlp.hpp"
#include "coherentcast/picnn.hpp"
#include "coherentcast/windows.hpp"

namespace coherentcast {

struct TrainingHistory {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::size_t best_epoch = 0;  ///< 1-based epoch whose parameters were kept
};

/// Everything needed to forecast one series: parameters, scalers and the layout of the inputs.
struct SeriesModel {
    std::string series;
    ModelKind kind = ModelKind::lstm_picnn;
    WindowShape shape;
    bool future_covariates = true;
    MinMaxScaler target;
    std::vector<MinMaxScaler> covariates;  ///< one per covariate column

    LstmParams lstm;
    PicnnParams picnn;
    MlpParams mlp;

    TrainingHistory history;

    std::size_t covariate_count() const noexcept { return covariates.size(); }
    /// Width of the PICNN's context input (encoder state plus the flattened future block).
    std::size_t context_width() const;
};

/// Training knobs shared by both model kinds.
struct TrainOptions {
    std::size_t batch_size = 64;
    double learning_rate = 0.001;
    std::size_t max_epochs = 200;
    std::size_t patience = 20;
    std::size_t train_samples = 64;
    std::size_t val_samples = 64;
    double beta = 1.0;
    std::uint64_t seed = 0;

    static TrainOptions from(const RunConfig& cfg);
};

/// Input length of the MLP: target history, last-step covariates and the horizon calendar block.
std::size_t mlp_input_width(const SeriesModel& model);

/// Scalers fitted on the first `train_length` hours (the training partition's data).
SeriesModel prepare_model(const std::string& series, const RunConfig& cfg, const std::vector<double>& target,
                          const Covariates& covariates, std::size_t train_length);

/// Fresh LSTM + PICNN parameters with the given activation string.
void init_lstm_picnn(SeriesModel& model, const RunConfig& cfg, const std::string& activations, std::uint64_t seed);

/// Context block with the target and every covariate min-max scaled.
RowMatrix scaled_context(const SeriesModel& model, const FeatureWindow& window);
/// Flattened horizon calendar block, or empty when future covariates are off.
std::vector<double> future_block(const SeriesModel& model, const FeatureWindow& window);
std::vector<double> scaled_target(const SeriesModel& model, const FeatureWindow& window);

/// PICNN conditioning vector u_0 = [LSTM state, future block].
std::vector<double> picnn_context(const SeriesModel& model, const FeatureWindow& window);

/**
 * @brief Adam training with best-validation checkpointing and early stopping.
 *
 * LSTM+PICNN minimizes the mean energy score of train_samples scenarios per
 * window; MLP minimizes the summed pinball loss over its quantile levels. The
 * returned model holds the parameters of the best validation epoch. Non-finite
 * losses throw NumericalError naming the epoch.
 */
void train_model(SeriesModel& model, const std::vector<FeatureWindow>& train, const std::vector<FeatureWindow>& val,
                 const TrainOptions& options);

/// Mean validation score of the current parameters (energy score or summed pinball, scaled units).
double validation_score(const SeriesModel& model, const std::vector<FeatureWindow>& val, const TrainOptions& options);

/// Candidate MLP architectures tried in order; the best validation score wins.
SeriesModel train_mlp_grid(const SeriesModel& prepared, const RunConfig& cfg, const std::vector<FeatureWindow>& train,
                           const std::vector<FeatureWindow>& val, const TrainOptions& options);

/// m x horizon scenarios in the series' original units.
RowMatrix forecast_scenarios(const SeriesModel& model, const FeatureWindow& window, std::size_t m, std::uint64_t seed);

/// Scaled quantile of the first horizon step at alpha * 1 for each alpha in the grid (LSTM+PICNN only).
std::vector<double> conditional_cdf(const SeriesModel& model, const FeatureWindow& window,
                                    const std::vector<double>& alphas);

}  // namespace coherentcast
