// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coherentcast/artifact.hpp"
#include "coherentcast/cone.hpp"
#include "coherentcast/config.hpp"
#include "coherentcast/csv.hpp"
#include "coherentcast/energy_score.hpp"
#include "coherentcast/errors.hpp"
#include "coherentcast/finite_diff.hpp"
#include "coherentcast/hierarchy.hpp"
#include "coherentcast/lstm.hpp"
#include "coherentcast/metrics.hpp"
#include "coherentcast/model.hpp"
#include "coherentcast/picnn.hpp"
#include "coherentcast/pipeline.hpp"
#include "coherentcast/random.hpp"
#include "coherentcast/reconciler.hpp"
#include "coherentcast/reconciler_training.hpp"
#include "coherentcast/scenario_io.hpp"
#include "coherentcast/synthetic.hpp"

using namespace coherentcast;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check, double limit_seconds = 0.0) {
    const auto start = Clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double took = seconds_since(start);
    if (limit_seconds > 0.0 && took > limit_seconds) {
        o.pass = false;
        o.detail += "; runtime over " + std::to_string(static_cast<int>(limit_seconds)) + " s";
    }
    if (!o.pass) ++failures;
    std::printf("%s [%2d] %s (%s; %.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), took);
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double rel_err(double a, double b, double floor) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

std::vector<double> uniform_vec(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

ReconcilerParams random_params(Rng& rng, std::size_t d) {
    ReconcilerParams p{Eigen::MatrixXd::Zero(d, d)};
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) p.q_r(i, j) = i == j ? rng.uniform(0.5, 2.0) : rng.uniform(-0.5, 0.5);
    }
    return p;
}

Eigen::VectorXd random_x_hat(Rng& rng, std::size_t d) {
    Eigen::VectorXd x(d);
    for (auto& v : x) v = rng.uniform(-2.0, 4.0);
    return x;
}

std::string file_digest(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& f : files) {
        for (const char c : fs::relative(f, dir).string() + "\n" + read_text_file(f.string())) {
            h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
        }
    }
    return std::to_string(files.size()) + " files, fnv " + std::to_string(h);
}

// ---------------------------------------------------------------- pipeline

struct Run {
    RunConfig cfg;
    bool ok = false;
    std::string error;
};

Run run_pipeline(const std::string& config_path, const fs::path& out) {
    Run r;
    r.cfg = load_config(config_path);
    r.cfg.out_dir = out.string();
    r.cfg.validate();
    fs::remove_all(out);
    std::ostringstream log;
    try {
        const auto step = [&](const char* name, void (*cmd)(const RunConfig&, std::ostream&), const RunConfig& cfg) {
            const auto start = Clock::now();
            cmd(cfg, log);
            std::printf("  %-18s %6.1f s\n", name, seconds_since(start));
            std::fflush(stdout);
        };
        step("ingest", cmd_ingest, r.cfg);
        step("train-base", cmd_train_base, r.cfg);
        step("forecast", cmd_forecast, r.cfg);
        for (const auto mode : {WeightMode::id, WeightMode::coef, WeightMode::dcl}) {
            RunConfig c = r.cfg;
            c.weight_mode = mode;
            step(("reconciler " + to_string(mode)).c_str(), cmd_train_reconciler, c);
        }
        step("evaluate", cmd_evaluate, r.cfg);
        r.ok = true;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

// ---------------------------------------------------------------- criteria

Outcome no_quantile_crossing(const RunConfig& cfg) {
    const auto data = load_dataset(cfg);
    const auto model = load_model(model_path(cfg, "total"));
    const auto& windows = data.windows.front();
    Rng rng(101);
    double worst = INFINITY;
    const std::size_t tau = cfg.horizon;
    for (int c = 0; c < 100; ++c) {
        const auto h = picnn_context(model, windows[rng.below(windows.size())]);
        for (int k = 0; k < 100; ++k) {
            const auto a1 = uniform_vec(rng, tau, 0.0, 1.0);
            const auto a2 = uniform_vec(rng, tau, 0.0, 1.0);
            const auto q1 = quantile(model.picnn, a1, h);
            const auto q2 = quantile(model.picnn, a2, h);
            double dot = 0.0;
            for (std::size_t t = 0; t < tau; ++t) dot += (q1[t] - q2[t]) * (a1[t] - a2[t]);
            worst = std::min(worst, dot);
        }
    }
    return {worst >= -1e-8, "10^4 pairs over 100 contexts, min inner product " + fmt(worst)};
}

Outcome partial_convexity() {
    Rng rng(202);
    double worst = -INFINITY;
    const auto combos = activation_combinations(4);
    for (const auto& acts : combos) {
        PicnnConfig c;
        c.context_dim = 4;
        c.tau = 4;
        c.hidden = 8;
        c.v_activations = parse_activation_string(acts);
        c.layers = acts.size();
        const auto p = project_weights(PicnnParams::init(c, rng.next()));
        for (int trial = 0; trial < 10000; ++trial) {
            const auto h = uniform_vec(rng, 4, -2, 2);
            const auto a1 = uniform_vec(rng, 4, 0.0, 1.0);
            const auto a2 = uniform_vec(rng, 4, 0.0, 1.0);
            std::vector<double> mid(4);
            for (std::size_t j = 0; j < 4; ++j) mid[j] = 0.5 * (a1[j] + a2[j]);
            const double gap = picnn_forward(p, mid, h) - 0.5 * (picnn_forward(p, a1, h) + picnn_forward(p, a2, h));
            worst = std::max(worst, gap);
        }
    }
    return {worst <= 1e-9 && combos.size() == 28,
            std::to_string(combos.size()) + " activation strings x 10^4 triples, max violation " + fmt(worst)};
}

Outcome autodiff_correctness() {
    const std::size_t input = 3, hidden = 6, tau = 4, m = 8, steps = 10;
    const auto lstm = LstmParams::init(input, hidden, 1, 31);
    PicnnConfig pc;
    pc.context_dim = hidden;
    pc.tau = tau;
    pc.hidden = 8;
    pc.v_activations = parse_activation_string("rg");
    pc.layers = 2;
    const auto picnn = project_weights(PicnnParams::init(pc, 32));
    Rng rng(33);
    RowMatrix ctx(steps, input);
    for (Eigen::Index i = 0; i < ctx.size(); ++i) ctx.data()[i] = rng.uniform(-1, 1);
    const RowMatrix levels = sample_levels(m, tau, 34);
    const auto actual = uniform_vec(rng, tau, -0.5, 0.5);

    Graph g;
    const auto lv = bind(g, lstm, true, "lstm.");
    const auto pv = bind(g, picnn, true, "picnn.");
    const Var h = encode(g, lv, {&ctx});
    const auto out = forward(g, pv, g.constant(Tensor::from_matrix(levels)), g.repeat_rows(h, m), true);
    const auto grads = g.backward(g.energy_score(out.q, actual, 1.0));

    auto loss = [&](const LstmParams& lp, const PicnnParams& pp) {
        const auto state = encode(lp, ctx);
        std::vector<double> samples;
        for (std::size_t i = 0; i < m; ++i) {
            const std::vector<double> a(levels.row(static_cast<Eigen::Index>(i)).data(),
                                        levels.row(static_cast<Eigen::Index>(i)).data() + tau);
            const auto q = quantile(pp, a, state);
            samples.insert(samples.end(), q.begin(), q.end());
        }
        return energy_score(Tensor::matrix(m, tau, samples), actual);
    };

    ParameterMap all;
    lstm.export_to(all, "lstm.");
    picnn.export_to(all, "picnn.");
    std::vector<std::pair<std::string, std::size_t>> entries;
    for (const auto& [name, value] : all) {
        for (std::size_t i = 0; i < value.size(); ++i) entries.emplace_back(name, i);
    }
    std::shuffle(entries.begin(), entries.end(), std::mt19937_64(35));
    entries.resize(150);
    double worst = 0.0;
    for (const auto& [name, i] : entries) {
        auto eval = [&](double delta) {
            ParameterMap copy = all;
            auto values = copy.at(name).values();
            values[i] += delta;
            copy.at(name) = Tensor(copy.at(name).shape(), values);
            return loss(LstmParams::import_from(copy, "lstm.", input, hidden, 1),
                        PicnnParams::import_from(copy, "picnn.", pc));
        };
        const double eps = 1e-6;
        const double fd = (eval(eps) - eval(-eps)) / (2 * eps);
        worst = std::max(worst, rel_err(grads.at(name)[i], fd, 1e-4));
    }
    return {worst <= 1e-4, std::to_string(entries.size()) + " parameters, hidden 6/8, tau 4, max rel err " + fmt(worst)};
}

Outcome dcl_gradients() {
    Rng rng(404);
    double worst = 0.0;
    int checked = 0;
    while (checked < 100) {
        const std::size_t n = 2 + rng.below(4);
        const auto hier = Hierarchy::single_level(n);
        const auto params = random_params(rng, n + 1);
        const auto x_hat = random_x_hat(rng, n + 1);
        const auto sol = reconcile(x_hat, params, hier);
        bool clear = true;
        for (Eigen::Index i = 0; i < sol.x.size(); ++i) clear = clear && (sol.x(i) >= 1e-3 || sol.ineq_multipliers(i) >= 1e-3);
        if (!clear) continue;
        ++checked;
        Eigen::VectorXd up(n + 1);
        for (auto& v : up) v = rng.uniform(-1, 1);
        const auto g = dcl_backward(sol, up);
        auto loss = [&](const Eigen::VectorXd& xh, const ReconcilerParams& p) { return up.dot(reconcile(xh, p, hier).x); };
        const double eps = 1e-6;
        for (std::size_t i = 0; i <= n; ++i) {
            Eigen::VectorXd plus = x_hat, minus = x_hat;
            plus(i) += eps;
            minus(i) -= eps;
            worst = std::max(worst, rel_err(g.d_x_hat(i), (loss(plus, params) - loss(minus, params)) / (2 * eps), 1e-3));
        }
        for (std::size_t r = 0; r <= n; ++r) {
            for (std::size_t c = 0; c <= r; ++c) {
                ReconcilerParams plus = params, minus = params;
                plus.q_r(r, c) += eps;
                minus.q_r(r, c) -= eps;
                worst = std::max(worst, rel_err(g.d_q_r(r, c), (loss(x_hat, plus) - loss(x_hat, minus)) / (2 * eps), 1e-3));
            }
        }
    }
    return {worst <= 1e-3, "100 instances with n <= 5, max rel err " + fmt(worst)};
}

Outcome coherency(const RunConfig& cfg) {
    const auto frame = read_hourly_csv(output_path(cfg, "hourly.csv"));
    const auto samples = load_samples(cfg, frame, "test");
    const auto artifact = load_reconciler(reconciler_path(cfg, WeightMode::dcl));
    const auto hier = Hierarchy::single_level(frame.station_count());
    double gap = 0.0, low = INFINITY;
    std::size_t vectors = 0, bad = 0;
    std::size_t m = 0, tau = 0;
    for (const auto& s : samples) {
        const auto r = reconcile_scenarios(s.scenarios, artifact.params, hier, cfg.workers);
        m = r.count;
        tau = r.horizon;
        for (std::size_t i = 0; i < r.count; ++i) {
            for (std::size_t t = 0; t < r.horizon; ++t) {
                const auto v = r.vector(i, t);
                const double g = hier.coherency_gap(v);
                gap = std::max(gap, g);
                low = std::min(low, v.minCoeff());
                if (g > 1e-8 || v.minCoeff() < -1e-10) ++bad;
                ++vectors;
            }
        }
    }
    const bool shape = m == 1000 && tau == 24 && !samples.empty();
    return {shape && bad == 0,
            std::to_string(vectors) + " vectors over " + std::to_string(samples.size()) + " test origins (m " +
                std::to_string(m) + ", tau " + std::to_string(tau) + "), max gap " + fmt(gap) + ", min entry " + fmt(low)};
}

Outcome qp_optimality() {
    Rng rng(606);
    double worst_gap = -INFINITY, worst_cone = 0.0, worst_eta = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(4);
        const std::size_t d = n + 1;
        const auto hier = Hierarchy::single_level(n);
        const auto params = random_params(rng, d);
        const auto x_hat = random_x_hat(rng, d);
        const auto sol = reconcile(x_hat, params, hier);
        const double best = reconciliation_objective(x_hat, sol.x, params);
        const Eigen::MatrixXd& q = params.q_r;
        double z[6], r[6];
        for (int k = 0; k < 100000; ++k) {
            double total = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                z[j] = rng.uniform() < 0.2 ? 0.0 : rng.uniform(0.0, 4.0);
                total += z[j];
            }
            r[0] = x_hat(0) - total;
            for (std::size_t j = 0; j < n; ++j) r[j + 1] = x_hat(static_cast<Eigen::Index>(j + 1)) - z[j];
            double obj = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
                double row = 0.0;
                for (std::size_t b = 0; b <= a; ++b) row += q(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * r[b];
                obj += row * row;
            }
            worst_gap = std::max(worst_gap, best - obj);
        }
        const auto cone = assemble_cone(x_hat, params, hier);
        const auto v = cone_variable(sol);
        worst_cone = std::max(worst_cone, cone_violation(cone, hier, v));
        worst_eta = std::max(worst_eta, std::abs(cone.c.dot(v) - (params.q_r * (x_hat - sol.x)).norm()));
    }
    return {worst_gap <= 1e-9 && worst_cone <= 1e-7 && worst_eta <= 1e-7,
            "1000 instances x 10^5 feasible points, max (solution - point) " + fmt(worst_gap) + ", cone violation " +
                fmt(worst_cone) + ", eta mismatch " + fmt(worst_eta)};
}

struct GaussianFit {
    SeriesModel model;
    std::vector<FeatureWindow> test;
    GaussianDataset data;
};

GaussianFit fit_gaussian() {
    GaussianFit fit;
    const Timestamp start = *parse_timestamp("2024-01-01T00:00");
    fit.data = generate_gaussian({}, start, 24 * 70, 71);
    RunConfig cfg;
    cfg.context = 24;
    cfg.horizon = 4;
    cfg.lstm_layers = 1;
    cfg.lstm_hidden = 8;
    cfg.picnn_layers = 2;
    cfg.picnn_hidden = 32;
    const auto windows = make_windows(fit.data.frame.series(1), fit.data.covariates, cfg.window_shape());
    const std::size_t n_train = 24 * 50, n_val = 24 * 10;
    std::vector<FeatureWindow> train, val;
    for (const auto& w : windows) {
        const std::size_t end = w.origin_index + cfg.horizon;
        if (end <= n_train) {
            train.push_back(w);
        } else if (w.origin_index >= n_train && end <= n_train + n_val) {
            if (w.origin_index % 2 == 0) val.push_back(w);
        } else if (w.origin_index >= n_train + n_val) {
            fit.test.push_back(w);
        }
    }
    fit.model = prepare_model("gauss", cfg, fit.data.frame.series(1), fit.data.covariates, n_train);
    init_lstm_picnn(fit.model, cfg, "gg", 72);
    TrainOptions options;
    options.batch_size = 32;
    options.learning_rate = 0.002;
    options.max_epochs = 80;
    options.patience = 100;
    options.train_samples = 64;
    options.val_samples = 64;
    options.seed = 73;
    train_model(fit.model, train, val, options);
    return fit;
}

Outcome distribution_recovery(const GaussianFit& fit) {
    const std::vector<double> levels{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> model_loss(levels.size(), 0.0), oracle_loss(levels.size(), 0.0);
    std::size_t count = 0;
    for (const auto& w : fit.test) {
        const RowMatrix s = forecast_scenarios(fit.model, w, 1000, derive_seed(74, w.origin_index));
        for (std::size_t t = 0; t < w.target.size(); ++t) {
            std::vector<double> col(s.rows());
            for (Eigen::Index i = 0; i < s.rows(); ++i) col[static_cast<std::size_t>(i)] = s(i, static_cast<Eigen::Index>(t));
            std::sort(col.begin(), col.end());
            const Timestamp when = fit.data.frame.timestamp(w.origin_index + t);
            for (std::size_t j = 0; j < levels.size(); ++j) {
                model_loss[j] += pinball(w.target[t], sorted_quantile(col, levels[j]), levels[j]);
                oracle_loss[j] += pinball(w.target[t], fit.data.law.quantile(when, levels[j]), levels[j]);
            }
            ++count;
        }
    }
    double worst = 0.0;
    std::string per_level;
    for (std::size_t j = 0; j < levels.size(); ++j) {
        const double ratio = model_loss[j] / oracle_loss[j];
        worst = std::max(worst, std::abs(ratio - 1.0));
        per_level += (j ? " " : "") + fmt(ratio);
    }
    return {worst <= 0.10, std::to_string(count) + " test steps, model/oracle pinball ratio per level [" + per_level +
                               "], best epoch " + std::to_string(fit.model.history.best_epoch)};
}

Outcome reconciliation_direction(const RunConfig& cfg) {
    const auto summary = read_csv_file(output_path(cfg, "report/summary.csv"));
    std::map<std::string, double> es;
    for (const auto& r : summary.rows) es[r.fields[summary.column("method")]] = *parse_number(r.fields[summary.column("energy_per_step")]);
    const auto anova = read_csv_file(output_path(cfg, "report/anova.csv"));
    double p = 1.0;
    for (const auto& r : anova.rows) {
        if (r.fields[0] == "original" && r.fields[1] == "reconciled-dcl") p = *parse_number(r.fields[anova.column("p")]);
    }
    const double dcl = es.at("reconciled-dcl"), id = es.at("reconciled-id"), orig = es.at("original");
    return {dcl <= id && dcl <= orig && p < 0.05, "ES dcl " + fmt(dcl) + ", id " + fmt(id) + ", original " + fmt(orig) +
                                                      ", coef " + fmt(es.at("reconciled-coef")) + "; ANOVA p(dcl vs original) " + fmt(p)};
}

Outcome metric_oracles() {
    Rng rng(909);
    double worst = 0.0;
    auto track = [&](double a, double b) { worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b))); };
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 30 + rng.below(40);
        const auto a = uniform_vec(rng, n, 0, 10), p = uniform_vec(rng, n, 0, 10);
        double s1 = 0, s2 = 0, num = 0, den = 0;
        for (std::size_t i = 0; i < n; ++i) {
            s1 += std::abs(a[i] - p[i]);
            s2 += (a[i] - p[i]) * (a[i] - p[i]);
        }
        for (std::size_t t = 24; t < n; ++t) {
            num += std::abs(a[t] - p[t]);
            den += std::abs(a[t] - a[t - 24]);
        }
        track(mae(a, p), s1 / n);
        track(rmse(a, p), std::sqrt(s2 / n));
        track(*mase(a, p, 24), num / den);

        const double alpha = rng.uniform(0.05, 0.95);
        double ql = 0;
        for (std::size_t i = 0; i < n; ++i) ql += a[i] >= p[i] ? alpha * (a[i] - p[i]) : (1 - alpha) * (p[i] - a[i]);
        track(quantile_loss(a, p, alpha), ql / n);

        std::vector<double> lo(n), hi(n);
        double ws = 0;
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = p[i] - rng.uniform(0, 2);
            hi[i] = p[i] + rng.uniform(0, 2);
            ws += hi[i] - lo[i] + (a[i] < lo[i] ? 2 / (1 - 0.8) * (lo[i] - a[i]) : 0) + (a[i] > hi[i] ? 2 / (1 - 0.8) * (a[i] - hi[i]) : 0);
        }
        track(winkler(a, lo, hi, 0.8), ws / n);

        const std::size_t m = 2 + rng.below(20), d = 1 + rng.below(5);
        const auto w = uniform_vec(rng, m * d, -3, 3), x = uniform_vec(rng, d, -3, 3);
        double first = 0, second = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double dist = 0;
            for (std::size_t k = 0; k < d; ++k) dist += (w[i * d + k] - x[k]) * (w[i * d + k] - x[k]);
            first += std::sqrt(dist);
            for (std::size_t j = 0; j < m; ++j) {
                double dd = 0;
                for (std::size_t k = 0; k < d; ++k) dd += (w[i * d + k] - w[j * d + k]) * (w[i * d + k] - w[j * d + k]);
                second += std::sqrt(dd);
            }
        }
        track(energy_score(Tensor::matrix(m, d, w), x), first / m - second / (2.0 * m * m));

        std::vector<std::vector<double>> groups(2 + rng.below(3));
        double total = 0;
        std::size_t count = 0;
        for (auto& g : groups) {
            g = uniform_vec(rng, 3 + rng.below(10), 0, 1 + rng.uniform());
            total += std::accumulate(g.begin(), g.end(), 0.0);
            count += g.size();
        }
        const double grand = total / count;
        double ssb = 0, ssw = 0;
        for (const auto& g : groups) {
            const double mean = std::accumulate(g.begin(), g.end(), 0.0) / g.size();
            ssb += g.size() * (mean - grand) * (mean - grand);
            for (const double v : g) ssw += (v - mean) * (v - mean);
        }
        const double f = (ssb / (groups.size() - 1)) / (ssw / (count - groups.size()));
        track(anova_oneway(groups).f, f);
    }
    const auto hier = Hierarchy::single_level(2);
    Eigen::VectorXd x_hat(3);
    x_hat << 3, 1, 1;
    const auto r = reconcile(x_hat, ReconcilerParams::identity(3), hier).x;
    const double hand_qp = std::max({std::abs(r(0) - 8.0 / 3), std::abs(r(1) - 4.0 / 3), std::abs(r(2) - 4.0 / 3)});
    const std::vector<double> es_obs{0.0};
    const double es_hand = energy_score(Tensor::matrix(2, 1, {1.0, -1.0}), es_obs);
    const double f_hand = anova_oneway({{1, 2, 3}, {4, 5, 6}}).f;
    const bool hand = hand_qp <= 1e-10 && std::abs(es_hand - 0.5) <= 1e-12 && std::abs(f_hand - 13.5) <= 1e-10;
    return {worst <= 1e-10 && hand, "100 random inputs per metric, max rel deviation " + fmt(worst) +
                                        "; [3,1,1] -> [" + fmt(r(0)) + ", " + fmt(r(1)) + ", " + fmt(r(2)) + "], ES " +
                                        fmt(es_hand) + ", F " + fmt(f_hand)};
}

Outcome activation_sweep(const RunConfig& cfg) {
    std::ostringstream log;
    cmd_sweep_activations(cfg, log);
    const auto table = read_csv_file(output_path(cfg, "sweep/sweep.csv"));
    const auto cdf = read_csv_file(output_path(cfg, "sweep/cdf.csv"));
    std::map<std::string, std::vector<double>> curves;
    for (const auto& r : cdf.rows) curves[r.fields[0]].push_back(*parse_number(r.fields[2]));
    std::size_t monotone = 0;
    for (const auto& [name, q] : curves) {
        bool ok = q.size() == 99;
        for (std::size_t i = 1; i < q.size(); ++i) ok = ok && q[i] >= q[i - 1];
        if (ok) ++monotone;
    }
    std::vector<std::string> depth2;
    for (const auto& r : table.rows) {
        if (r.fields[1] == "2") depth2.push_back(r.fields[0]);
    }
    const bool subset = depth2 == std::vector<std::string>{"gg", "gr", "rg", "rr"} &&
                        activation_combinations(2) == depth2;
    return {table.rows.size() == 28 && curves.size() == 28 && monotone == 28 && subset,
            std::to_string(table.rows.size()) + " rows, " + std::to_string(monotone) + "/" + std::to_string(curves.size()) +
                " monotone 99-point curves, depth-2 rows " + std::to_string(depth2.size())};
}

Outcome determinism(const RunConfig& cfg, const fs::path& second, const GaussianFit& fit) {
    RunConfig again = cfg;
    again.out_dir = second.string();
    fs::remove_all(second);
    std::ostringstream log;
    cmd_ingest(again, log);
    cmd_train_base(again, log);
    cmd_forecast(again, log);
    const auto m1 = file_digest(fs::path(cfg.out_dir) / "models"), m2 = file_digest(second / "models");
    const auto s1 = file_digest(fs::path(cfg.out_dir) / "scenarios"), s2 = file_digest(second / "scenarios");

    const auto path = (second / "roundtrip.json").string();
    save_model(fit.model, cfg.to_text(false), path);
    const auto loaded = load_model(path);
    bool bitwise = true;
    for (const auto& w : fit.test) {
        const RowMatrix a = forecast_scenarios(fit.model, w, 200, 5);
        const RowMatrix b = forecast_scenarios(loaded, w, 200, 5);
        bitwise = bitwise && (a.array() == b.array()).all();
    }
    return {m1 == m2 && s1 == s2 && bitwise, "models " + m1 + (m1 == m2 ? " (equal)" : " vs " + m2) + "; scenarios " + s1 +
                                                 (s1 == s2 ? " (equal)" : " vs " + s2) + "; round-trip forecasts " +
                                                 (bitwise ? "bitwise equal" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string config = argc > 1 ? argv[1] : COHERENTCAST_SOURCE_DIR "/configs/synthetic.cfg";
    const fs::path work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "coherentcast_acceptance";
    fs::create_directories(work);

    std::printf("pipeline on %s\n", config.c_str());
    const auto start = Clock::now();
    const Run run = run_pipeline(config, work / "run");
    const double pipeline_seconds = seconds_since(start);
    if (!run.ok) std::printf("pipeline failed: %s\n", run.error.c_str());
    std::printf("  total              %6.1f s\n", pipeline_seconds);
    const auto needs_run = [&](const std::function<Outcome()>& f) {
        return [&, f]() -> Outcome { return run.ok ? f() : Outcome{false, "pipeline failed: " + run.error}; };
    };

    report(1, "no quantile crossing", needs_run([&] { return no_quantile_crossing(run.cfg); }), 60);
    report(2, "partial convexity", partial_convexity, 120);
    report(3, "autodiff correctness", autodiff_correctness);
    report(4, "DCL gradient correctness", dcl_gradients);
    report(5, "coherency", needs_run([&] { return coherency(run.cfg); }));
    report(6, "QP optimality and cone consistency", qp_optimality);

    const auto fit_start = Clock::now();
    GaussianFit fit;
    std::string fit_error;
    try {
        fit = fit_gaussian();
    } catch (const std::exception& e) {
        fit_error = e.what();
    }
    const double fit_seconds = seconds_since(fit_start);
    report(7, "distribution recovery",
           [&]() -> Outcome {
               if (!fit_error.empty()) return {false, "training failed: " + fit_error};
               auto o = distribution_recovery(fit);
               o.detail += ", training " + fmt(fit_seconds) + " s";
               return o;
           },
           600.0 - fit_seconds);
    report(8, "reconciliation direction", needs_run([&] { return reconciliation_direction(run.cfg); }));
    report(9, "metric oracles", metric_oracles);
    report(10, "activation sweep", needs_run([&] { return activation_sweep(run.cfg); }), 1800);
    report(11, "determinism and round-trip", needs_run([&] {
               return fit_error.empty() ? determinism(run.cfg, work / "rerun", fit) : Outcome{false, "no trained model"};
           }));

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
