#include "coherentcast/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <functional>
#include <sstream>

#include "coherentcast/activation.hpp"
#include "coherentcast/csv.hpp"
#include "coherentcast/errors.hpp"
#include "coherentcast/picnn.hpp"

namespace coherentcast {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::size_t to_size(const std::string& key, const std::string& v) {
    std::size_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    const auto d = parse_number(v);
    if (!d) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return *d;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& v, F&& convert) {
    std::vector<T> out;
    for (const auto& part : split_fields(v, ',')) {
        if (!part.empty()) out.push_back(convert(part));
    }
    return out;
}

std::string resolve(const std::string& base, const std::string& v) {
    if (v.empty() || base.empty() || v.rfind("http://", 0) == 0) return v;
    const std::filesystem::path p(v);
    if (p.is_absolute()) return v;
    return (std::filesystem::path(base) / p).lexically_normal().string();
}

template <typename T>
std::string join(const std::vector<T>& items) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) s += ",";
        if constexpr (std::is_floating_point_v<T>) {
            s += format_number(items[i]);
        } else {
            s += std::to_string(items[i]);
        }
    }
    return s;
}

Timestamp boundary(const std::string& key, const std::string& v) {
    if (auto t = parse_timestamp(v)) return *t;
    if (auto d = parse_date(v)) return Timestamp(*d);
    throw ConfigError(key + ": expected a date or timestamp, got '" + v + "'");
}

}  // namespace

std::string to_string(ModelKind kind) { return kind == ModelKind::lstm_picnn ? "lstm-picnn" : "mlp-qr"; }

std::string to_string(WeightMode mode) {
    switch (mode) {
        case WeightMode::dcl: return "dcl";
        case WeightMode::coef: return "coef";
        case WeightMode::id: return "id";
    }
    return "dcl";
}

ModelKind parse_model_kind(const std::string& text) {
    if (text == "lstm-picnn") return ModelKind::lstm_picnn;
    if (text == "mlp-qr") return ModelKind::mlp_qr;
    throw ConfigError("unknown model kind '" + text + "' (expected lstm-picnn or mlp-qr)");
}

WeightMode parse_weight_mode(const std::string& text) {
    if (text == "dcl") return WeightMode::dcl;
    if (text == "coef") return WeightMode::coef;
    if (text == "id") return WeightMode::id;
    throw ConfigError("unknown weight mode '" + text + "' (expected dcl, coef or id)");
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& v, const std::string& base) {
    using Setter = std::function<void(const std::string&)>;
    const std::map<std::string, Setter> setters{
        {"sessions", [&](const std::string& s) { c.sessions = resolve(base, s); }},
        {"weather", [&](const std::string& s) { c.weather = resolve(base, s); }},
        {"holidays", [&](const std::string& s) { c.holidays = resolve(base, s); }},
        {"out_dir", [&](const std::string& s) { c.out_dir = resolve(base, s); }},
        {"context", [&](const std::string& s) { c.context = to_size(key, s); }},
        {"horizon", [&](const std::string& s) { c.horizon = to_size(key, s); }},
        {"train_end", [&](const std::string& s) { c.train_end = s; }},
        {"val_end", [&](const std::string& s) { c.val_end = s; }},
        {"test_end", [&](const std::string& s) { c.test_end = s; }},
        {"reconciler_fraction", [&](const std::string& s) { c.reconciler_fraction = to_double(key, s); }},
        {"origin_stride", [&](const std::string& s) { c.origin_stride = to_size(key, s); }},
        {"train_stride", [&](const std::string& s) { c.train_stride = to_size(key, s); }},
        {"future_covariates", [&](const std::string& s) { c.future_covariates = to_bool(key, s); }},
        {"model", [&](const std::string& s) { c.model = parse_model_kind(s); }},
        {"lstm_layers", [&](const std::string& s) { c.lstm_layers = to_size(key, s); }},
        {"lstm_hidden", [&](const std::string& s) { c.lstm_hidden = to_size(key, s); }},
        {"picnn_layers", [&](const std::string& s) { c.picnn_layers = to_size(key, s); }},
        {"picnn_hidden", [&](const std::string& s) { c.picnn_hidden = to_size(key, s); }},
        {"activations", [&](const std::string& s) { c.activations = s; }},
        {"u_activation", [&](const std::string& s) { c.u_activation = s; }},
        {"batch_size", [&](const std::string& s) { c.batch_size = to_size(key, s); }},
        {"learning_rate", [&](const std::string& s) { c.learning_rate = to_double(key, s); }},
        {"max_epochs", [&](const std::string& s) { c.max_epochs = to_size(key, s); }},
        {"patience", [&](const std::string& s) { c.patience = to_size(key, s); }},
        {"train_samples", [&](const std::string& s) { c.train_samples = to_size(key, s); }},
        {"val_samples", [&](const std::string& s) { c.val_samples = to_size(key, s); }},
        {"beta", [&](const std::string& s) { c.beta = to_double(key, s); }},
        {"mlp_depths", [&](const std::string& s) { c.mlp_depths = to_list<std::size_t>(s, [&](const std::string& x) { return to_size(key, x); }); }},
        {"mlp_widths", [&](const std::string& s) { c.mlp_widths = to_list<std::size_t>(s, [&](const std::string& x) { return to_size(key, x); }); }},
        {"scenarios", [&](const std::string& s) { c.scenarios = to_size(key, s); }},
        {"seed", [&](const std::string& s) { c.seed = to_u64(key, s); }},
        {"weight_mode", [&](const std::string& s) { c.weight_mode = parse_weight_mode(s); }},
        {"dcl_learning_rate", [&](const std::string& s) { c.dcl_learning_rate = to_double(key, s); }},
        {"dcl_epochs", [&](const std::string& s) { c.dcl_epochs = to_size(key, s); }},
        {"dcl_samples", [&](const std::string& s) { c.dcl_samples = to_size(key, s); }},
        {"dcl_batch", [&](const std::string& s) { c.dcl_batch = to_size(key, s); }},
        {"random_pairing", [&](const std::string& s) { c.random_pairing = to_bool(key, s); }},
        {"mase_lags", [&](const std::string& s) { c.mase_lags = to_list<std::size_t>(s, [&](const std::string& x) { return to_size(key, x); }); }},
        {"ql_levels", [&](const std::string& s) { c.ql_levels = to_list<double>(s, [&](const std::string& x) { return to_double(key, x); }); }},
        {"ws_levels", [&](const std::string& s) { c.ws_levels = to_list<double>(s, [&](const std::string& x) { return to_double(key, x); }); }},
        {"sweep_max_layers", [&](const std::string& s) { c.sweep_max_layers = to_size(key, s); }},
        {"sweep_epochs", [&](const std::string& s) { c.sweep_epochs = to_size(key, s); }},
        {"sweep_series", [&](const std::string& s) { c.sweep_series = s; }},
        {"workers", [&](const std::string& s) { c.workers = to_size(key, s); }},
    };
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(v);
}

RunConfig parse_config(const std::string& text, const std::string& source, const std::string& base_dir) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(number) + ": expected key = value");
        try {
            set_config_value(cfg, trim(body.substr(0, eq)), trim(body.substr(eq + 1)), base_dir);
        } catch (const ConfigError& e) {
            throw ConfigError(source + ":" + std::to_string(number) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    const auto text = read_text_file(path);
    const auto dir = std::filesystem::path(path).parent_path().string();
    return parse_config(text, path, dir.empty() ? "." : dir);
}

void RunConfig::validate() const {
    if (std::find(std::begin(kAllowedHorizons), std::end(kAllowedHorizons), horizon) == std::end(kAllowedHorizons)) {
        throw ConfigError("horizon must be one of 24, 48, 72, 96 (got " + std::to_string(horizon) + ")");
    }
    if (context == 0) throw ConfigError("context must be positive");
    if (lstm_layers == 0 || lstm_hidden == 0) throw ConfigError("LSTM sizes must be positive");
    if (picnn_layers == 0 || picnn_hidden == 0) throw ConfigError("PICNN sizes must be positive");
    const auto acts = parse_activation_string(activations);
    if (acts.size() != picnn_layers) {
        throw ConfigError("activation string '" + activations + "' has " + std::to_string(acts.size()) +
                          " letters but picnn_layers = " + std::to_string(picnn_layers));
    }
    parse_activation(u_activation);
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(learning_rate > 0.0) || !(dcl_learning_rate > 0.0)) throw ConfigError("learning rates must be positive");
    if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
    if (train_samples < 2 || val_samples < 1) throw ConfigError("train_samples must be >= 2 and val_samples >= 1");
    if (!(beta > 0.0 && beta < 2.0)) throw ConfigError("beta must lie in (0, 2)");
    if (mlp_depths.empty() || mlp_widths.empty()) throw ConfigError("mlp_depths and mlp_widths need at least one value");
    if (origin_stride == 0 || train_stride == 0) throw ConfigError("origin_stride and train_stride must be positive");
    if (workers == 0) throw ConfigError("workers must be positive");
    if (sweep_max_layers < 2) throw ConfigError("sweep_max_layers must be at least 2");
    for (const double a : ql_levels) {
        if (!(a > 0.0 && a < 1.0)) throw ConfigError("ql_levels must lie in (0, 1)");
    }
    for (const double a : ws_levels) {
        if (!(a > 0.0 && a < 1.0)) throw ConfigError("ws_levels must lie in (0, 1)");
    }
    if (!train_end.empty() || !val_end.empty()) coherentcast::validate(split());
}

SplitSpec RunConfig::split() const {
    if (train_end.empty() || val_end.empty()) throw ConfigError("train_end and val_end are required");
    SplitSpec s;
    s.train_end = boundary("train_end", train_end);
    s.val_end = boundary("val_end", val_end);
    if (!test_end.empty()) s.test_end = boundary("test_end", test_end);
    s.reconciler_fraction = reconciler_fraction;
    return s;
}

std::string RunConfig::to_text(bool include_out_dir) const {
    std::ostringstream o;
    auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << "\n"; };
    kv("sessions", sessions);
    kv("weather", weather);
    kv("holidays", holidays);
    if (include_out_dir) kv("out_dir", out_dir);
    kv("context", std::to_string(context));
    kv("horizon", std::to_string(horizon));
    kv("train_end", train_end);
    kv("val_end", val_end);
    kv("test_end", test_end);
    kv("reconciler_fraction", format_number(reconciler_fraction));
    kv("origin_stride", std::to_string(origin_stride));
    kv("train_stride", std::to_string(train_stride));
    kv("future_covariates", future_covariates ? "true" : "false");
    kv("model", to_string(model));
    kv("lstm_layers", std::to_string(lstm_layers));
    kv("lstm_hidden", std::to_string(lstm_hidden));
    kv("picnn_layers", std::to_string(picnn_layers));
    kv("picnn_hidden", std::to_string(picnn_hidden));
    kv("activations", activations);
    kv("u_activation", u_activation);
    kv("batch_size", std::to_string(batch_size));
    kv("learning_rate", format_number(learning_rate));
    kv("max_epochs", std::to_string(max_epochs));
    kv("patience", std::to_string(patience));
    kv("train_samples", std::to_string(train_samples));
    kv("val_samples", std::to_string(val_samples));
    kv("beta", format_number(beta));
    kv("mlp_depths", join(mlp_depths));
    kv("mlp_widths", join(mlp_widths));
    kv("scenarios", std::to_string(scenarios));
    kv("seed", std::to_string(seed));
    kv("weight_mode", to_string(weight_mode));
    kv("dcl_learning_rate", format_number(dcl_learning_rate));
    kv("dcl_epochs", std::to_string(dcl_epochs));
    kv("dcl_samples", std::to_string(dcl_samples));
    kv("dcl_batch", std::to_string(dcl_batch));
    kv("random_pairing", random_pairing ? "true" : "false");
    kv("mase_lags", join(mase_lags));
    kv("ql_levels", join(ql_levels));
    kv("ws_levels", join(ws_levels));
    kv("sweep_max_layers", std::to_string(sweep_max_layers));
    kv("sweep_epochs", std::to_string(sweep_epochs));
    kv("sweep_series", sweep_series);
    kv("workers", std::to_string(workers));
    return o.str();
}

}  // namespace coherentcast
