#include "coherentcast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>


#include "coherentcast/artifact.hpp"
#include "coherentcast/csv.hpp"
#include "coherentcast/energy_score.hpp"
#include "coherentcast/errors.hpp"
#include "coherentcast/hierarchy.hpp"
#include "coherentcast/metrics.hpp"
#include "coherentcast/parallel.hpp"
#include "coherentcast/random.hpp"
#include "coherentcast/scenario_io.hpp"
#include "coherentcast/weather.hpp"

namespace coherentcast {

namespace fs = std::filesystem;

namespace {

constexpr const char* kOriginal = "original";

void require_file(const std::string& path, const std::string& what) {
    if (path.empty()) throw ConfigError(what + " path is not configured");
    if (!fs::exists(path)) throw InputError(path, 0, what + " not found");
}

std::size_t train_length(const RunConfig& cfg, const TimeSeriesFrame& frame) {
    const auto end = cfg.split().train_end;
    std::size_t n = 0;
    while (n < frame.length() && frame.timestamp(n) < end) ++n;
    return n;
}

std::vector<FeatureWindow> pick(const std::vector<FeatureWindow>& windows, const std::vector<std::size_t>& idx) {
    std::vector<FeatureWindow> out;
    out.reserve(idx.size());
    for (const auto i : idx) out.push_back(windows[i]);
    return out;
}

SeriesModel load_series_model(const RunConfig& cfg, const std::string& series) {
    const auto path = model_path(cfg, series);
    require_file(path, "model artifact for series '" + series + "'");
    auto m = load_model(path);
    if (m.shape.horizon != cfg.horizon || m.shape.context != cfg.context) {
        throw ConfigError("model for '" + series + "' was trained with context " + std::to_string(m.shape.context) +
                          " and horizon " + std::to_string(m.shape.horizon) + ", config asks for " +
                          std::to_string(cfg.context) + " and " + std::to_string(cfg.horizon));
    }
    return m;
}

std::uint64_t origin_seed(const RunConfig& cfg, std::size_t origin_index) {
    return derive_seed(cfg.seed, 0xF0000 + origin_index);
}

Hierarchy hierarchy_for(const TimeSeriesFrame& frame) { return Hierarchy::single_level(frame.station_count()); }

std::vector<double> scenario_mean(const ScenarioTensor& s, std::size_t k) {
    std::vector<double> out(s.horizon, 0.0);
    for (std::size_t i = 0; i < s.count; ++i) {
        for (std::size_t t = 0; t < s.horizon; ++t) out[t] += s.at(i, k, t);
    }
    for (auto& v : out) v /= static_cast<double>(s.count);
    return out;
}

std::vector<double> column(const ScenarioTensor& s, std::size_t k, std::size_t t) {
    std::vector<double> out(s.count);
    for (std::size_t i = 0; i < s.count; ++i) out[i] = s.at(i, k, t);
    return out;
}

void print_partition_sizes(std::ostream& out, const Dataset& d) {
    out << "windows: base_train " << d.parts.base_train.size() << ", base_val " << d.parts.base_val.size() << ", test "
        << d.parts.test.size() << " (dcl_train " << d.parts.dcl_train.size() << ", dcl_val " << d.parts.dcl_val.size()
        << ")\n";
}

}  // namespace

std::string output_path(const RunConfig& cfg, const std::string& relative) {
    return (fs::path(cfg.out_dir) / relative).string();
}

std::string model_path(const RunConfig& cfg, const std::string& series) {
    return output_path(cfg, "models/" + series + ".json");
}

std::string reconciler_path(const RunConfig& cfg, WeightMode mode) {
    return output_path(cfg, "reconciler/" + to_string(mode) + ".json");
}

std::vector<std::size_t> strided(const std::vector<std::size_t>& items, std::size_t stride) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < items.size(); i += std::max<std::size_t>(stride, 1)) out.push_back(items[i]);
    return out;
}

Dataset load_dataset(const RunConfig& cfg) {
    const auto hourly = output_path(cfg, "hourly.csv");
    const auto cov = output_path(cfg, "covariates.csv");
    require_file(hourly, "hourly series (run ingest first)");
    require_file(cov, "covariates (run ingest first)");
    Dataset d;
    d.frame = read_hourly_csv(hourly);
    d.covariates = read_covariates_csv(cov);
    if (d.covariates.start != d.frame.start() || d.covariates.length() != d.frame.length()) {
        throw InputError(cov, 0, "covariates are not aligned with the hourly series");
    }
    for (std::size_t k = 0; k < d.frame.series_count(); ++k) {
        d.windows.push_back(make_windows(d.frame.series(k), d.covariates, cfg.window_shape()));
    }
    std::vector<Timestamp> origins;
    for (const auto& w : d.windows.front()) origins.push_back(w.origin);
    d.parts = split_origins(origins, cfg.split());
    return d;
}

Eigen::MatrixXd actuals_at(const TimeSeriesFrame& frame, Timestamp origin, std::size_t horizon) {
    const std::size_t start = frame.index_of(origin);
    if (start + horizon > frame.length()) {
        throw ContractError("horizon starting at " + format_timestamp(origin) + " runs past the end of the data");
    }
    Eigen::MatrixXd a(static_cast<Eigen::Index>(frame.series_count()), static_cast<Eigen::Index>(horizon));
    for (std::size_t k = 0; k < frame.series_count(); ++k) {
        for (std::size_t t = 0; t < horizon; ++t) a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) = frame.series(k)[start + t];
    }
    return a;
}

std::vector<ReconcileSample> load_samples(const RunConfig& cfg, const TimeSeriesFrame& frame, const std::string& partition) {
    std::vector<ReconcileSample> out;
    const auto names = frame.series_names();
    for (const auto& path : list_scenario_files(output_path(cfg, "scenarios"), partition)) {
        ReconcileSample s;
        s.scenarios = read_scenarios(path);
        if (s.scenarios.series != names || s.scenarios.horizon != cfg.horizon) {
            throw NumericalError(path + ": scenario shape does not match the data (series or horizon)");
        }
        if (cfg.random_pairing) s.scenarios = shuffle_pairing(s.scenarios, derive_seed(s.scenarios.seed, 0xA1));
        s.actual = actuals_at(frame, s.scenarios.origin, s.scenarios.horizon);
        out.push_back(std::move(s));
    }
    return out;
}

double univariate_energy(std::vector<double> samples, double actual, double beta) {
    if (samples.empty()) throw ContractError("energy score of an empty sample");
    if (beta != 1.0) {
        return energy_score(Tensor::matrix(samples.size(), 1, samples), std::span(&actual, 1), {beta});
    }
    std::sort(samples.begin(), samples.end());
    const auto m = static_cast<double>(samples.size());
    double first = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        first += std::abs(samples[i] - actual);
        pairs += (2.0 * static_cast<double>(i) - m + 1.0) * samples[i];
    }
    // sum over ordered pairs |w_i - w_j| = 2 * pairs
    return first / m - pairs / (m * m);
}

EvalReport evaluate_methods(const RunConfig& cfg, const TimeSeriesFrame& frame, const std::vector<std::string>& methods,
                            const std::vector<std::vector<ScenarioTensor>>& scenarios,
                            const std::vector<Eigen::MatrixXd>& actuals) {
    if (methods.size() != scenarios.size()) throw ContractError("one scenario list per method expected");
    if (actuals.empty()) throw ConfigError("test partition has no scenario files");
    const auto names = frame.series_names();
    const std::size_t d = names.size();
    const std::size_t tau = cfg.horizon;
    EvalReport report;
    report.methods = methods;

    for (std::size_t j = 0; j < methods.size(); ++j) {
        const auto& list = scenarios[j];
        if (list.size() != actuals.size()) throw NumericalError("method '" + methods[j] + "' has a different origin count");
        for (std::size_t o = 0; o < list.size(); ++o) {
            if (list[o].dimension() != d || list[o].horizon != tau || static_cast<std::size_t>(actuals[o].rows()) != d ||
                static_cast<std::size_t>(actuals[o].cols()) != tau) {
                throw NumericalError("scenario shape does not match the actuals at origin " + format_timestamp(list[o].origin));
            }
        }

        // per-series metrics
        std::vector<SeriesMetrics> rows(d);
        parallel_for(d, cfg.workers, [&](std::size_t k) {
            std::vector<double> act, mean;
            std::map<std::size_t, std::vector<double>> lag_act, lag_pred, lag_base;
            std::map<double, std::vector<double>> qpred;
            std::map<double, std::pair<std::vector<double>, std::vector<double>>> bounds;
            double energy = 0.0;
            const auto& series = frame.series(k);
            for (std::size_t o = 0; o < list.size(); ++o) {
                const auto m = scenario_mean(list[o], k);
                const std::size_t start = frame.index_of(list[o].origin);
                for (std::size_t t = 0; t < tau; ++t) {
                    const double a = actuals[o](static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));
                    act.push_back(a);
                    mean.push_back(m[t]);
                    for (const auto lag : cfg.mase_lags) {
                        if (start + t >= lag) {
                            lag_act[lag].push_back(a);
                            lag_pred[lag].push_back(m[t]);
                            lag_base[lag].push_back(series[start + t - lag]);
                        }
                    }
                    auto col = column(list[o], k, t);
                    energy += univariate_energy(col, a, cfg.beta);
                    std::sort(col.begin(), col.end());
                    for (const double level : cfg.ql_levels) qpred[level].push_back(sorted_quantile(col, level));
                    for (const double level : cfg.ws_levels) {
                        bounds[level].first.push_back(sorted_quantile(col, (1.0 - level) / 2.0));
                        bounds[level].second.push_back(sorted_quantile(col, (1.0 + level) / 2.0));
                    }
                }
            }
            SeriesMetrics& r = rows[k];
            r.series = names[k];
            r.method = methods[j];
            r.mae = mae(act, mean);
            r.rmse = rmse(act, mean);
            for (const auto lag : cfg.mase_lags) {
                r.mase[lag] = lag_act[lag].empty() ? std::nullopt
                                                   : mase_with_lagged(lag_act[lag], lag_pred[lag], lag_base[lag]);
            }
            for (const double level : cfg.ql_levels) r.ql[level] = quantile_loss(act, qpred[level], level);
            for (const double level : cfg.ws_levels) r.ws[level] = winkler(act, bounds[level].first, bounds[level].second, level);
            r.energy = energy / static_cast<double>(act.size());
        });
        report.series.insert(report.series.end(), rows.begin(), rows.end());

        // hierarchy-level scores
        const Hierarchy hier = hierarchy_for(frame);
        std::vector<double> per_step(list.size() * tau);
        std::vector<double> flattened(list.size());
        parallel_for(list.size(), cfg.workers, [&](std::size_t o) {
            for (std::size_t t = 0; t < tau; ++t) {
                per_step[o * tau + t] = step_energy_score(list[o].step(t), actuals[o].col(static_cast<Eigen::Index>(t)), cfg.beta);
            }
            RowMatrix flat(static_cast<Eigen::Index>(list[o].count), static_cast<Eigen::Index>(d * tau));
            for (std::size_t i = 0; i < list[o].count; ++i) {
                for (std::size_t k = 0; k < d; ++k) {
                    for (std::size_t t = 0; t < tau; ++t) flat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k * tau + t)) = list[o].at(i, k, t);
                }
            }
            Eigen::VectorXd truth(static_cast<Eigen::Index>(d * tau));
            for (std::size_t k = 0; k < d; ++k) {
                for (std::size_t t = 0; t < tau; ++t) truth(static_cast<Eigen::Index>(k * tau + t)) = actuals[o](static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));
            }
            flattened[o] = step_energy_score(flat, truth, cfg.beta);
        });
        MethodSummary s;
        s.method = methods[j];
        s.observations = per_step.size();
        for (const double v : per_step) s.energy_per_step += v;
        s.energy_per_step /= static_cast<double>(per_step.size());
        for (const double v : flattened) s.energy_flattened += v;
        s.energy_flattened /= static_cast<double>(flattened.size());
        s.min_value = std::numeric_limits<double>::infinity();
        for (const auto& tensor : list) {
            for (std::size_t i = 0; i < tensor.count; ++i) {
                for (std::size_t t = 0; t < tau; ++t) {
                    const auto v = tensor.vector(i, t);
                    s.max_coherency_gap = std::max(s.max_coherency_gap, hier.coherency_gap(v));
                    s.min_value = std::min(s.min_value, v.minCoeff());
                }
            }
        }
        report.summaries.push_back(s);
        report.step_energy[methods[j]] = per_step;
    }
    std::vector<std::vector<double>> groups;
    for (const auto& m : methods) groups.push_back(report.step_energy.at(m));
    if (groups.size() >= 2) report.anova = anova_table(groups);
    return report;
}

std::vector<std::string> activation_combinations(std::size_t max_layers) {
    std::vector<std::string> out;
    for (std::size_t len = 2; len <= max_layers; ++len) {
        for (std::size_t code = 0; code < (std::size_t{1} << len); ++code) {
            std::string s;
            for (std::size_t b = 0; b < len; ++b) s.push_back((code >> (len - 1 - b)) & 1 ? 'r' : 'g');
            out.push_back(s);
        }
    }
    return out;
}

void cmd_ingest(const RunConfig& cfg, std::ostream& out) {
    require_file(cfg.sessions, "sessions file");
    if (cfg.weather.rfind("http://", 0) != 0) require_file(cfg.weather, "weather file");
    const auto sessions = read_sessions_csv(cfg.sessions);
    std::set<std::string> ids;
    for (const auto& s : sessions) ids.insert(s.station_id);
    const auto frame = aggregate_sessions(sessions, covering_range(sessions), {ids.begin(), ids.end()});
    const auto weather = make_weather_provider(cfg.weather)->load();
    HolidaySet holidays;
    if (!cfg.holidays.empty()) {
        require_file(cfg.holidays, "holidays file");
        holidays = read_holidays(cfg.holidays);
    }
    const auto cov = build_features(frame, weather, holidays);
    write_hourly_csv(frame, output_path(cfg, "hourly.csv"));
    write_covariates_csv(cov, output_path(cfg, "covariates.csv"));
    out << "sessions: " << sessions.size() << "\n";
    out << "hourly rows: " << frame.length() << " (" << frame.station_count() << " stations + total)\n";
    out << "covariate rows: " << cov.length() << " (" << cov.width() << " columns)\n";
}

void cmd_train_base(const RunConfig& cfg, std::ostream& out) {
    const auto data = load_dataset(cfg);
    print_partition_sizes(out, data);
    const auto names = data.frame.series_names();
    const std::size_t n_train = train_length(cfg, data.frame);
    const auto snapshot = cfg.to_text(false);
    for (std::size_t k = 0; k < names.size(); ++k) {
        const auto train = pick(data.windows[k], strided(data.parts.base_train, cfg.train_stride));
        const auto val = pick(data.windows[k], strided(data.parts.base_val, cfg.train_stride));
        auto options = TrainOptions::from(cfg);
        options.seed = derive_seed(cfg.seed, 0x100 + k);
        SeriesModel model = prepare_model(names[k], cfg, data.frame.series(k), data.covariates, n_train);
        if (cfg.model == ModelKind::lstm_picnn) {
            init_lstm_picnn(model, cfg, cfg.activations, derive_seed(cfg.seed, 0x200 + k));
            train_model(model, train, val, options);
        } else {
            model = train_mlp_grid(model, cfg, train, val, options);
        }
        save_model(model, snapshot, model_path(cfg, names[k]));
        const auto& h = model.history;
        out << names[k] << ": " << h.val_loss.size() << " epochs, best epoch " << h.best_epoch << ", validation "
            << format_number(h.val_loss[h.best_epoch - 1]) << " (epoch 1: " << format_number(h.val_loss.front()) << ")\n";
    }
}

void cmd_forecast(const RunConfig& cfg, std::ostream& out) {
    if (cfg.scenarios == 0) throw ConfigError("scenario count must be at least 1");
    const auto data = load_dataset(cfg);
    const auto names = data.frame.series_names();
    std::vector<SeriesModel> models;
    for (const auto& name : names) models.push_back(load_series_model(cfg, name));
    const std::string dir = output_path(cfg, "scenarios");
    const std::pair<const char*, const std::vector<std::size_t>*> partitions[] = {{"val", &data.parts.base_val},
                                                                                  {"test", &data.parts.test}};
    for (const auto& [name, indices] : partitions) {
        fs::remove_all(fs::path(dir) / name);
        const auto chosen = strided(*indices, cfg.origin_stride);
        parallel_for(chosen.size(), cfg.workers, [&](std::size_t o) {
            const auto& anchor = data.windows.front()[chosen[o]];
            auto tensor = ScenarioTensor::zeros(anchor.origin, names, cfg.scenarios, cfg.horizon);
            tensor.seed = origin_seed(cfg, anchor.origin_index);
            for (std::size_t k = 0; k < names.size(); ++k) {
                tensor.set_series_block(k, forecast_scenarios(models[k], data.windows[k][chosen[o]], cfg.scenarios,
                                                              derive_seed(tensor.seed, k)));
            }
            write_scenarios(tensor, scenario_path(dir, name, anchor.origin));
        });
        out << name << ": " << chosen.size() << " origins, shape [" << cfg.scenarios << ", " << names.size() << ", "
            << cfg.horizon << "]\n";
    }
}

void cmd_train_reconciler(const RunConfig& cfg, std::ostream& out) {
    const auto frame = read_hourly_csv(output_path(cfg, "hourly.csv"));
    const auto samples = load_samples(cfg, frame, "val");
    if (samples.empty()) throw ConfigError("no validation scenarios found (run forecast first)");
    const Hierarchy hier = hierarchy_for(frame);
    const std::size_t n_train = reconciler_train_count(samples.size(), cfg.reconciler_fraction);
    const std::vector<ReconcileSample> train(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(n_train));
    const std::vector<ReconcileSample> val(samples.begin() + static_cast<std::ptrdiff_t>(n_train), samples.end());
    if (train.empty()) throw ConfigError("partition dcl_train is empty");
    if (val.empty()) throw ConfigError("partition dcl_val is empty");

    DclOptions options;
    options.learning_rate = cfg.dcl_learning_rate;
    options.epochs = cfg.dcl_epochs;
    options.samples = cfg.dcl_samples;
    options.batch = cfg.dcl_batch;
    options.beta = cfg.beta;
    options.seed = cfg.seed;
    options.workers = cfg.workers;

    ReconcilerArtifact artifact;
    artifact.mode = cfg.weight_mode;
    artifact.series = frame.series_names();
    switch (cfg.weight_mode) {
        case WeightMode::id:
            artifact.params = ReconcilerParams::identity(hier.dimension());
            break;
        case WeightMode::coef:
            artifact.params = ReconcilerParams::from_weight(coef_weight(forecast_errors(samples)));
            break;
        case WeightMode::dcl:
            artifact = train_reconciler(train, val, hier, options);
            artifact.series = frame.series_names();
            break;
    }
    const double id_val = reconciled_score(ReconcilerParams::identity(hier.dimension()), hier, val, options);
    const double val_score = reconciled_score(artifact.params, hier, val, options);
    save_reconciler(artifact, reconciler_path(cfg, cfg.weight_mode));
    write_text_file(output_path(cfg, "reconciler/" + to_string(cfg.weight_mode) + "_q.csv"), weight_csv(artifact));
    out << "weight mode " << to_string(cfg.weight_mode) << ": dcl_train " << train.size() << " origins, dcl_val "
        << val.size() << " origins\n";
    out << "dcl_val energy score: " << format_number(val_score) << " (identity " << format_number(id_val) << ")\n";
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    const auto frame = read_hourly_csv(output_path(cfg, "hourly.csv"));
    const auto samples = load_samples(cfg, frame, "test");
    if (samples.empty()) throw ConfigError("no test scenarios found (run forecast first)");
    const Hierarchy hier = hierarchy_for(frame);
    std::vector<std::string> methods{kOriginal};
    std::vector<std::vector<ScenarioTensor>> scenarios(1);
    std::vector<Eigen::MatrixXd> actuals;
    for (const auto& s : samples) {
        scenarios[0].push_back(s.scenarios);
        actuals.push_back(s.actual);
    }
    for (const auto mode : {WeightMode::id, WeightMode::coef, WeightMode::dcl}) {
        const auto path = reconciler_path(cfg, mode);
        if (!fs::exists(path)) continue;
        const auto artifact = load_reconciler(path);
        if (artifact.params.dimension() != hier.dimension()) throw NumericalError(path + ": Q_r dimension does not match the data");
        methods.push_back("reconciled-" + to_string(mode));
        std::vector<ScenarioTensor> rec;
        for (const auto& s : samples) rec.push_back(reconcile_scenarios(s.scenarios, artifact.params, hier, cfg.workers));
        scenarios.push_back(std::move(rec));
    }
    const auto report = evaluate_methods(cfg, frame, methods, scenarios, actuals);
    write_text_file(output_path(cfg, "report/report.json"), report_json(report));
    write_text_file(output_path(cfg, "report/metrics.csv"), metrics_csv(report));
    write_text_file(output_path(cfg, "report/anova.csv"), anova_csv(report));
    write_text_file(output_path(cfg, "report/summary.csv"), summary_csv(report));

    std::string energy = "method,origin,step,energy\n";
    std::string steps = "method,origin,step,series,actual,mean,q05,q50,q95\n";
    const auto names = frame.series_names();
    for (std::size_t j = 0; j < methods.size(); ++j) {
        const auto& es = report.step_energy.at(methods[j]);
        for (std::size_t o = 0; o < scenarios[j].size(); ++o) {
            const auto& s = scenarios[j][o];
            const auto origin = format_timestamp(s.origin);
            for (std::size_t t = 0; t < s.horizon; ++t) {
                energy += methods[j] + "," + origin + "," + std::to_string(t + 1) + "," + format_number(es[o * s.horizon + t]) + "\n";
            }
            for (std::size_t k = 0; k < names.size(); ++k) {
                const auto mean = scenario_mean(s, k);
                for (std::size_t t = 0; t < s.horizon; ++t) {
                    auto col = column(s, k, t);
                    std::sort(col.begin(), col.end());
                    steps += methods[j] + "," + origin + "," + std::to_string(t + 1) + "," + names[k] + "," +
                             format_number(actuals[o](static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t))) + "," +
                             format_number(mean[t]) + "," + format_number(sorted_quantile(col, 0.05)) + "," +
                             format_number(sorted_quantile(col, 0.5)) + "," + format_number(sorted_quantile(col, 0.95)) + "\n";
                }
            }
        }
    }
    write_text_file(output_path(cfg, "report/energy.csv"), energy);
    write_text_file(output_path(cfg, "report/steps.csv"), steps);

    out << "test origins: " << samples.size() << "\n";
    for (const auto& s : report.summaries) {
        out << s.method << ": energy score " << format_number(s.energy_per_step) << ", max coherency gap "
            << format_number(s.max_coherency_gap) << "\n";
    }
    for (const auto& p : report.anova.pairwise) {
        out << "ANOVA " << methods[p.first] << " vs " << methods[p.second] << ": F "
            << (std::isinf(p.result.f) ? std::string("inf") : format_number(p.result.f)) << ", p "
            << format_number(p.result.p) << "\n";
    }
}

void cmd_sweep_activations(const RunConfig& cfg, std::ostream& out) {
    const auto data = load_dataset(cfg);
    const auto names = data.frame.series_names();
    const auto it = std::find(names.begin(), names.end(), cfg.sweep_series);
    if (it == names.end()) throw ConfigError("sweep_series '" + cfg.sweep_series + "' is not a series of the data");
    const auto k = static_cast<std::size_t>(it - names.begin());
    const auto train = pick(data.windows[k], strided(data.parts.base_train, cfg.train_stride));
    const auto val = pick(data.windows[k], strided(data.parts.base_val, cfg.train_stride));
    const auto eval_idx = strided(data.parts.base_val, cfg.origin_stride);
    const auto& probe = data.windows[k][data.parts.base_val.front()];
    std::vector<double> grid;
    for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);

    std::string table = "activations,layers,val_mae,best_epoch\n";
    std::string cdf = "activations,alpha,q\n";
    const auto combos = activation_combinations(cfg.sweep_max_layers);
    for (std::size_t c = 0; c < combos.size(); ++c) {
        RunConfig variant = cfg;
        variant.model = ModelKind::lstm_picnn;
        variant.activations = combos[c];
        variant.picnn_layers = combos[c].size();
        auto options = TrainOptions::from(variant);
        options.max_epochs = cfg.sweep_epochs;
        options.patience = 0;
        options.seed = derive_seed(cfg.seed, 0x5000 + c);
        SeriesModel model = prepare_model(names[k], variant, data.frame.series(k), data.covariates, train_length(cfg, data.frame));
        init_lstm_picnn(model, variant, combos[c], derive_seed(cfg.seed, 0x6000 + c));
        train_model(model, train, val, options);

        std::vector<double> abs_err(eval_idx.size(), 0.0);
        parallel_for(eval_idx.size(), cfg.workers, [&](std::size_t i) {
            const auto& w = data.windows[k][eval_idx[i]];
            const RowMatrix s = forecast_scenarios(model, w, cfg.val_samples, derive_seed(options.seed, w.origin_index));
            const Eigen::RowVectorXd mean = s.colwise().mean();
            for (std::size_t t = 0; t < w.target.size(); ++t) abs_err[i] += std::abs(mean(static_cast<Eigen::Index>(t)) - w.target[t]);
        });
        double total = 0.0;
        for (const double e : abs_err) total += e;
        const double val_mae = total / static_cast<double>(eval_idx.size() * cfg.horizon);
        table += combos[c] + "," + std::to_string(combos[c].size()) + "," + format_number(val_mae) + "," +
                 std::to_string(model.history.best_epoch) + "\n";
        const auto curve = conditional_cdf(model, probe, grid);
        for (std::size_t g = 0; g < grid.size(); ++g) cdf += combos[c] + "," + format_number(grid[g]) + "," + format_number(curve[g]) + "\n";
        out << combos[c] << ": validation MAE " << format_number(val_mae) << "\n";
    }
    write_text_file(output_path(cfg, "sweep/sweep.csv"), table);
    write_text_file(output_path(cfg, "sweep/cdf.csv"), cdf);
    out << combos.size() << " combinations\n";
}

}  // namespace coherentcast
