#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coherentcast/timestamp.hpp"
#include "coherentcast/windows.hpp"

namespace coherentcast {

enum class ModelKind { lstm_picnn, mlp_qr };
enum class WeightMode { dcl, coef, id };

std::string to_string(ModelKind kind);
std::string to_string(WeightMode mode);
ModelKind parse_model_kind(const std::string& text);
WeightMode parse_weight_mode(const std::string& text);

/// Horizons the pipeline accepts.
inline constexpr std::size_t kAllowedHorizons[] = {24, 48, 72, 96};

/**
 * @brief Every knob of a pipeline run.
 *
 * Loaded from a flat `key = value` file ('#' starts a comment). Relative paths
 * resolve against the config file's directory. Command-line flags override the
 * file after loading.
 */
struct RunConfig {
    // inputs and outputs
    std::string sessions;
    std::string weather;  ///< file path or http:// URL
    std::string holidays;
    std::string out_dir = "out";

    // windows and splits
    std::size_t context = 168;
    std::size_t horizon = 24;
    std::string train_end;
    std::string val_end;
    std::string test_end;  ///< optional
    double reconciler_fraction = 0.8;
    std::size_t origin_stride = 1;  ///< spacing of forecast origins written by `forecast`
    std::size_t train_stride = 1;   ///< spacing of the windows used for base-model training and validation
    bool future_covariates = true;  ///< append the horizon's calendar features to the encoder state

    // base model
    ModelKind model = ModelKind::lstm_picnn;
    std::size_t lstm_layers = 2;
    std::size_t lstm_hidden = 100;
    std::size_t picnn_layers = 2;
    std::size_t picnn_hidden = 40;
    std::string activations = "rg";
    std::string u_activation = "tanh";
    std::size_t batch_size = 64;
    double learning_rate = 0.001;
    std::size_t max_epochs = 200;
    std::size_t patience = 20;  ///< epochs without validation improvement before stopping; 0 disables
    std::size_t train_samples = 64;  ///< scenarios per window inside the training loss
    std::size_t val_samples = 64;
    double beta = 1.0;
    std::vector<std::size_t> mlp_depths{2, 3, 4};
    std::vector<std::size_t> mlp_widths{100, 250};

    // scenarios and reconciliation
    std::size_t scenarios = 1000;
    std::uint64_t seed = 0;
    WeightMode weight_mode = WeightMode::dcl;
    double dcl_learning_rate = 0.01;
    std::size_t dcl_epochs = 50;
    std::size_t dcl_samples = 0;  ///< scenarios per origin used while training Q_r; 0 uses all
    std::size_t dcl_batch = 0;    ///< origins per Adam step; 0 uses all
    bool random_pairing = false;  ///< shuffle scenario indices per series before reconciling

    // evaluation
    std::vector<std::size_t> mase_lags{24, 168};
    std::vector<double> ql_levels{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> ws_levels{0.6, 0.8};

    // activation sweep
    std::size_t sweep_max_layers = 4;
    std::size_t sweep_epochs = 5;
    std::string sweep_series = "total";

    std::size_t workers = 1;

    /// Throws ConfigError for any inconsistent value.
    void validate() const;
    /// Resolved partition boundaries.
    SplitSpec split() const;
    WindowShape window_shape() const { return {context, horizon}; }
    /// `key = value` lines that load back into an identical config; artifacts omit out_dir.
    std::string to_text(bool include_out_dir = true) const;
};

/// Parses `key = value` text; unknown keys and malformed values throw ConfigError naming the line.
RunConfig parse_config(const std::string& text, const std::string& source, const std::string& base_dir = "");
/// Reads and parses the file; a missing file throws InputError.
RunConfig load_config(const std::string& path);
/// Applies one key (same names as the file) to an existing config.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value, const std::string& base_dir = "");

}  // namespace coherentcast
