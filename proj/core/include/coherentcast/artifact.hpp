#pragma once

#include <string>
#include <vector>

#include "coherentcast/config.hpp"
#include "coherentcast/model.hpp"
#include "coherentcast/reconciler.hpp"

namespace coherentcast {

/// JSON text of a trained series model plus the config it was trained with. Doubles round-trip exactly.
std::string model_to_json(const SeriesModel& model, const std::string& config_snapshot);
SeriesModel model_from_json(const std::string& text, const std::string& source);

void save_model(const SeriesModel& model, const std::string& config_snapshot, const std::string& path);
/// Throws InputError when the file is missing or malformed.
SeriesModel load_model(const std::string& path);

struct ReconcilerHistory {
    std::vector<double> train_score;
    std::vector<double> val_score;
    std::size_t best_epoch = 0;  ///< 0 is the identity initialization
};

struct ReconcilerArtifact {
    WeightMode mode = WeightMode::dcl;
    std::vector<std::string> series;
    ReconcilerParams params;
    ReconcilerHistory history;
};

void save_reconciler(const ReconcilerArtifact& artifact, const std::string& path);
ReconcilerArtifact load_reconciler(const std::string& path);

/// CSV of Q = Q_r^T Q_r with series names as header and first column.
std::string weight_csv(const ReconcilerArtifact& artifact);

}  // namespace coherentcast
