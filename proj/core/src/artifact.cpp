#include "coherentcast/artifact.hpp"

#include <json.hpp>

#include "coherentcast/csv.hpp"
#include "coherentcast/errors.hpp"

namespace coherentcast {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json tensor_json(const Tensor& t) { return json{{"shape", t.shape()}, {"data", t.values()}}; }

Tensor tensor_from(const json& j) {
    return Tensor(j.at("shape").get<std::vector<std::size_t>>(), j.at("data").get<std::vector<double>>());
}

json scaler_json(const MinMaxScaler& s) { return json::array({s.min, s.max}); }
MinMaxScaler scaler_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

ParameterMap parameters_of(const SeriesModel& m) {
    ParameterMap params;
    if (m.kind == ModelKind::lstm_picnn) {
        m.lstm.export_to(params, "lstm.");
        m.picnn.export_to(params, "picnn.");
    } else {
        m.mlp.export_to(params, "mlp.");
    }
    return params;
}

}  // namespace

std::string model_to_json(const SeriesModel& m, const std::string& config_snapshot) {
    json j;
    j["format"] = "coherentcast-model";
    j["version"] = kFormatVersion;
    j["series"] = m.series;
    j["kind"] = to_string(m.kind);
    j["context"] = m.shape.context;
    j["horizon"] = m.shape.horizon;
    j["future_covariates"] = m.future_covariates;
    j["target_scaler"] = scaler_json(m.target);
    j["covariate_scalers"] = json::array();
    for (const auto& s : m.covariates) j["covariate_scalers"].push_back(scaler_json(s));
    if (m.kind == ModelKind::lstm_picnn) {
        j["lstm"] = {{"input_size", m.lstm.input_size}, {"hidden_size", m.lstm.hidden_size}, {"layers", m.lstm.layers.size()}};
        const auto& c = m.picnn.config;
        j["picnn"] = {{"context_dim", c.context_dim}, {"tau", c.tau},
                      {"hidden", c.hidden}, {"layers", c.layers},
                      {"output_width", c.output_width}, {"v_activations", activation_string(c.v_activations)},
                      {"u_activation", to_string(c.u_activation)}};
    } else {
        j["mlp"] = {{"sizes", m.mlp.sizes}};
    }
    json params = json::object();
    for (const auto& [name, t] : parameters_of(m)) params[name] = tensor_json(t);
    j["parameters"] = std::move(params);
    j["history"] = {{"train_loss", m.history.train_loss},
                    {"val_loss", m.history.val_loss},
                    {"best_epoch", m.history.best_epoch}};
    j["config"] = config_snapshot;
    return j.dump(1);
}

SeriesModel model_from_json(const std::string& text, const std::string& source) {
    try {
        const json j = json::parse(text);
        if (j.at("format") != "coherentcast-model") throw InputError(source, 0, "not a model artifact");
        if (j.at("version").get<int>() != kFormatVersion) throw InputError(source, 0, "unsupported artifact version");
        SeriesModel m;
        m.series = j.at("series").get<std::string>();
        m.kind = parse_model_kind(j.at("kind").get<std::string>());
        m.shape = {j.at("context").get<std::size_t>(), j.at("horizon").get<std::size_t>()};
        m.future_covariates = j.at("future_covariates").get<bool>();
        m.target = scaler_from(j.at("target_scaler"));
        for (const auto& s : j.at("covariate_scalers")) m.covariates.push_back(scaler_from(s));
        ParameterMap params;
        for (const auto& [name, t] : j.at("parameters").items()) params[name] = tensor_from(t);
        if (m.kind == ModelKind::lstm_picnn) {
            const auto& l = j.at("lstm");
            m.lstm = LstmParams::import_from(params, "lstm.", l.at("input_size").get<std::size_t>(),
                                             l.at("hidden_size").get<std::size_t>(), l.at("layers").get<std::size_t>());
            const auto& p = j.at("picnn");
            PicnnConfig c;
            c.context_dim = p.at("context_dim").get<std::size_t>();
            c.tau = p.at("tau").get<std::size_t>();
            c.hidden = p.at("hidden").get<std::size_t>();
            c.layers = p.at("layers").get<std::size_t>();
            c.output_width = p.at("output_width").get<std::size_t>();
            c.v_activations = parse_activation_string(p.at("v_activations").get<std::string>());
            c.u_activation = parse_activation(p.at("u_activation").get<std::string>());
            m.picnn = PicnnParams::import_from(params, "picnn.", c);
            m.picnn.check_nonnegative();
        } else {
            m.mlp = MlpParams::import_from(params, "mlp.", j.at("mlp").at("sizes").get<std::vector<std::size_t>>());
        }
        const auto& h = j.at("history");
        m.history.train_loss = h.at("train_loss").get<std::vector<double>>();
        m.history.val_loss = h.at("val_loss").get<std::vector<double>>();
        m.history.best_epoch = h.at("best_epoch").get<std::size_t>();
        return m;
    } catch (const json::exception& e) {
        throw InputError(source, 0, std::string("malformed model artifact: ") + e.what());
    } catch (const ContractError& e) {
        throw InputError(source, 0, std::string("inconsistent model artifact: ") + e.what());
    }
}

void save_model(const SeriesModel& model, const std::string& config_snapshot, const std::string& path) {
    write_text_file(path, model_to_json(model, config_snapshot));
}

SeriesModel load_model(const std::string& path) { return model_from_json(read_text_file(path), path); }

void save_reconciler(const ReconcilerArtifact& a, const std::string& path) {
    json j;
    j["format"] = "coherentcast-reconciler";
    j["version"] = kFormatVersion;
    j["mode"] = to_string(a.mode);
    j["series"] = a.series;
    json rows = json::array();
    for (Eigen::Index r = 0; r < a.params.q_r.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(a.params.q_r.cols()));
        for (Eigen::Index c = 0; c < a.params.q_r.cols(); ++c) row[static_cast<std::size_t>(c)] = a.params.q_r(r, c);
        rows.push_back(row);
    }
    j["q_r"] = std::move(rows);
    j["history"] = {{"train_score", a.history.train_score},
                    {"val_score", a.history.val_score},
                    {"best_epoch", a.history.best_epoch}};
    write_text_file(path, j.dump(1));
}

ReconcilerArtifact load_reconciler(const std::string& path) {
    const auto text = read_text_file(path);
    try {
        const json j = json::parse(text);
        if (j.at("format") != "coherentcast-reconciler") throw InputError(path, 0, "not a reconciler artifact");
        ReconcilerArtifact a;
        a.mode = parse_weight_mode(j.at("mode").get<std::string>());
        a.series = j.at("series").get<std::vector<std::string>>();
        const auto rows = j.at("q_r").get<std::vector<std::vector<double>>>();
        a.params.q_r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != rows.size()) throw InputError(path, 0, "Q_r is not square");
            for (std::size_t c = 0; c < rows.size(); ++c) a.params.q_r(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
        const auto& h = j.at("history");
        a.history.train_score = h.at("train_score").get<std::vector<double>>();
        a.history.val_score = h.at("val_score").get<std::vector<double>>();
        a.history.best_epoch = h.at("best_epoch").get<std::size_t>();
        return a;
    } catch (const json::exception& e) {
        throw InputError(path, 0, std::string("malformed reconciler artifact: ") + e.what());
    }
}

std::string weight_csv(const ReconcilerArtifact& a) {
    const Eigen::MatrixXd q = a.params.weight();
    std::string out = "series";
    for (const auto& s : a.series) out += "," + s;
    out += "\n";
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
        out += a.series.at(static_cast<std::size_t>(r));
        for (Eigen::Index c = 0; c < q.cols(); ++c) out += "," + format_number(q(r, c));
        out += "\n";
    }
    return out;
}

}  // namespace coherentcast
