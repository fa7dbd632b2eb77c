#include "coherentcast/picnn.hpp"

#include <algorithm>
#include <cmath>

#include "coherentcast/errors.hpp"
#include "coherentcast/random.hpp"

namespace coherentcast {

namespace {

struct Dims {
    std::size_t u_in, v_in, out;
    bool has_u_path;
};

Dims layer_dims(const PicnnConfig& c, std::size_t i) {
    Dims d;
    d.u_in = i == 0 ? c.context_dim : c.hidden;
    d.v_in = i == 0 ? c.tau : c.hidden;
    d.out = i + 1 == c.layers ? c.final_width() : c.hidden;
    d.has_u_path = i + 1 < c.layers;
    return d;
}

struct Slot {
    const char* name;
    Tensor PicnnLayer::*member;
};

constexpr Slot kSlots[] = {
    {"w_uu", &PicnnLayer::w_uu}, {"b_uu", &PicnnLayer::b_uu}, {"w_v", &PicnnLayer::w_v},
    {"w_vu", &PicnnLayer::w_vu}, {"b_vu", &PicnnLayer::b_vu}, {"w_a", &PicnnLayer::w_a},
    {"w_au", &PicnnLayer::w_au}, {"b_au", &PicnnLayer::b_au}, {"w_u", &PicnnLayer::w_u},
    {"b_v", &PicnnLayer::b_v},
};

std::vector<std::size_t> slot_shape(const PicnnConfig& c, std::size_t i, std::string_view name) {
    const auto d = layer_dims(c, i);
    if (name == "w_uu") return {d.u_in, c.hidden};
    if (name == "b_uu") return {1, c.hidden};
    if (name == "w_v") return {d.v_in, d.out};
    if (name == "w_vu") return {d.u_in, d.v_in};
    if (name == "b_vu") return {1, d.v_in};
    if (name == "w_a") return {c.tau, d.out};
    if (name == "w_au") return {d.u_in, c.tau};
    if (name == "b_au") return {1, c.tau};
    if (name == "w_u") return {d.u_in, d.out};
    return {1, d.out};  // b_v
}

bool slot_present(const PicnnConfig& c, std::size_t i, std::string_view name) {
    if (name == "w_uu" || name == "b_uu") return layer_dims(c, i).has_u_path;
    return true;
}

bool slot_nonnegative(std::string_view name) { return name == "w_v" || name == "w_a"; }

void check_alpha(std::span<const double> alpha, std::size_t tau) {
    if (alpha.size() != tau) throw ContractError("alpha has " + std::to_string(alpha.size()) + " entries, expected " + std::to_string(tau));
    for (const double a : alpha) {
        if (!(a > 0.0 && a < 1.0)) throw DomainError("quantile level outside (0, 1)");
    }
}

}  // namespace

void PicnnConfig::validate() const {
    if (context_dim == 0 || tau == 0 || hidden == 0 || layers == 0) throw ConfigError("PICNN sizes must be positive");
    if (v_activations.size() != layers) {
        throw ConfigError("PICNN needs one alpha-path activation per layer (" + std::to_string(layers) + "), got " +
                          std::to_string(v_activations.size()));
    }
    for (const auto a : v_activations) {
        if (!is_convex_nondecreasing(a)) throw ConfigError("alpha-path activation " + to_string(a) + " is not convex non-decreasing");
    }
}

std::vector<Activation> parse_activation_string(const std::string& code) {
    std::vector<Activation> out;
    for (const char ch : code) out.push_back(parse_activation(std::string(1, ch)));
    if (out.empty()) throw ConfigError("empty activation string");
    return out;
}

std::string activation_string(const std::vector<Activation>& acts) {
    std::string s;
    for (const auto a : acts) s.push_back(activation_code(a));
    return s;
}

PicnnParams PicnnParams::init(const PicnnConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);
    PicnnParams p;
    p.config = config;
    for (std::size_t i = 0; i < config.layers; ++i) {
        PicnnLayer layer;
        for (const auto& s : kSlots) {
            if (!slot_present(config, i, s.name)) continue;
            const auto shape = slot_shape(config, i, s.name);
            const double bound = 1.0 / std::sqrt(static_cast<double>(shape[0]));
            std::vector<double> data(shape[0] * shape[1]);
            for (auto& v : data) v = slot_nonnegative(s.name) ? rng.uniform(0.0, bound) : rng.uniform(-bound, bound);
            layer.*s.member = Tensor(shape, std::move(data));
        }
        p.layers.push_back(std::move(layer));
    }
    return p;
}

PicnnParams PicnnParams::zeros(const PicnnConfig& config) {
    config.validate();
    PicnnParams p;
    p.config = config;
    for (std::size_t i = 0; i < config.layers; ++i) {
        PicnnLayer layer;
        for (const auto& s : kSlots) {
            if (slot_present(config, i, s.name)) layer.*s.member = Tensor::zeros(slot_shape(config, i, s.name));
        }
        p.layers.push_back(std::move(layer));
    }
    return p;
}

void PicnnParams::check_nonnegative() const {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        for (const Tensor* t : {&layers[i].w_v, &layers[i].w_a}) {
            for (const double v : t->values()) {
                if (v < 0.0) throw InvariantError("PICNN layer " + std::to_string(i) + " has a negative convex-path weight");
            }
        }
    }
}

void PicnnParams::export_to(ParameterMap& out, const std::string& prefix) const {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        for (const auto& s : kSlots) {
            if (slot_present(config, i, s.name)) out[prefix + std::to_string(i) + "." + s.name] = layers[i].*s.member;
        }
    }
}

PicnnParams PicnnParams::import_from(const ParameterMap& in, const std::string& prefix, const PicnnConfig& config) {
    config.validate();
    PicnnParams p;
    p.config = config;
    for (std::size_t i = 0; i < config.layers; ++i) {
        PicnnLayer layer;
        for (const auto& s : kSlots) {
            if (!slot_present(config, i, s.name)) continue;
            const auto key = prefix + std::to_string(i) + "." + s.name;
            const auto it = in.find(key);
            if (it == in.end()) throw ContractError("missing PICNN parameter '" + key + "'");
            const auto shape = slot_shape(config, i, s.name);
            if (it->second.size() != shape[0] * shape[1]) throw ContractError("PICNN parameter '" + key + "' has the wrong size");
            layer.*s.member = it->second.reshaped(shape);
        }
        p.layers.push_back(std::move(layer));
    }
    return p;
}

bool is_nonnegative_parameter(const std::string& name) {
    auto ends_with = [&](std::string_view suffix) {
        return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    return ends_with(".w_v") || ends_with(".w_a");
}

namespace {

Tensor clamp_nonnegative(const Tensor& t) {
    std::vector<double> data = t.values();
    for (auto& v : data) v = std::max(v, 0.0);
    return Tensor(t.shape(), std::move(data));
}

}  // namespace

PicnnParams project_weights(PicnnParams params) {
    for (auto& layer : params.layers) {
        layer.w_v = clamp_nonnegative(layer.w_v);
        layer.w_a = clamp_nonnegative(layer.w_a);
    }
    return params;
}

void project_weights(ParameterMap& params) {
    for (auto& [name, t] : params) {
        if (is_nonnegative_parameter(name)) t = clamp_nonnegative(t);
    }
}

PicnnVars bind(Graph& graph, const PicnnParams& params, bool trainable, const std::string& prefix) {
    params.config.validate();
    PicnnVars vars;
    vars.config = params.config;
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        const auto& L = params.layers[i];
        auto put = [&](const char* name, const Tensor& t) {
            return trainable ? graph.parameter(prefix + std::to_string(i) + "." + name, t) : graph.constant(t);
        };
        PicnnVars::Layer v;
        v.has_u_path = layer_dims(params.config, i).has_u_path;
        if (v.has_u_path) {
            v.w_uu = put("w_uu", L.w_uu);
            v.b_uu = put("b_uu", L.b_uu);
        }
        v.w_v = put("w_v", L.w_v);
        v.w_vu = put("w_vu", L.w_vu);
        v.b_vu = put("b_vu", L.b_vu);
        v.w_a = put("w_a", L.w_a);
        v.w_au = put("w_au", L.w_au);
        v.b_au = put("b_au", L.b_au);
        v.w_u = put("w_u", L.w_u);
        v.b_v = put("b_v", L.b_v);
        vars.layers.push_back(v);
    }
    return vars;
}

PicnnOutput forward(Graph& graph, const PicnnVars& vars, Var alpha, Var context, bool with_quantile) {
    const auto& cfg = vars.config;
    const auto& A = graph.value(alpha);
    const std::size_t n = A.rows();
    if (A.cols() != cfg.tau) throw ContractError("alpha must have tau columns");
    if (graph.value(context).rows() != n || graph.value(context).cols() != cfg.context_dim) {
        throw ContractError("PICNN context must be N x " + std::to_string(cfg.context_dim));
    }
    for (const double a : A.values()) {
        if (!(a > 0.0 && a < 1.0)) throw DomainError("quantile level outside (0, 1)");
    }
    const std::size_t tau = cfg.tau;

    // Row (s * tau + j) of the seed tangent is e_j: direction j for sample s.
    Var seed{};
    if (with_quantile) {
        std::vector<double> eye(n * tau * tau, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t j = 0; j < tau; ++j) eye[(s * tau + j) * tau + j] = 1.0;
        }
        seed = graph.constant(Tensor::matrix(n * tau, tau, std::move(eye)));
    }

    Var u = context;
    Var v = alpha;
    Var tangent = seed;
    for (std::size_t i = 0; i < vars.layers.size(); ++i) {
        const auto& L = vars.layers[i];
        const Var gate_v = graph.activation(Activation::relu, graph.add_row(graph.matmul(u, L.w_vu), L.b_vu));
        const Var gate_a = graph.activation(Activation::relu, graph.add_row(graph.matmul(u, L.w_au), L.b_au));
        const Var z = graph.add_row(graph.add(graph.add(graph.matmul(graph.mul(v, gate_v), L.w_v),
                                                        graph.matmul(graph.mul(alpha, gate_a), L.w_a)),
                                              graph.matmul(u, L.w_u)),
                                    L.b_v);
        const Activation act = cfg.v_activations[i];
        if (with_quantile) {
            const Var dz = graph.add(graph.matmul(graph.mul(tangent, graph.repeat_rows(gate_v, tau)), L.w_v),
                                     graph.matmul(graph.mul(seed, graph.repeat_rows(gate_a, tau)), L.w_a));
            tangent = graph.mul(graph.repeat_rows(graph.activation_slope(act, z), tau), dz);
        }
        v = graph.activation(act, z);
        if (L.has_u_path) u = graph.activation(cfg.u_activation, graph.add_row(graph.matmul(u, L.w_uu), L.b_uu));
    }

    PicnnOutput out;
    out.f = graph.row_sum(v);
    if (with_quantile) out.q = graph.reshape(graph.row_sum(tangent), n, tau);
    return out;
}

namespace {

PicnnOutput evaluate_single(Graph& graph, const PicnnParams& params, std::span<const double> alpha,
                            std::span<const double> h, bool with_quantile) {
    params.config.validate();
    check_alpha(alpha, params.config.tau);
    if (h.size() != params.config.context_dim) throw ContractError("PICNN context has the wrong width");
    params.check_nonnegative();
    const auto vars = bind(graph, params, false, "picnn.");
    const Var a = graph.constant(Tensor::row({alpha.begin(), alpha.end()}));
    const Var u = graph.constant(Tensor::row({h.begin(), h.end()}));
    return forward(graph, vars, a, u, with_quantile);
}

}  // namespace

double picnn_forward(const PicnnParams& params, std::span<const double> alpha, std::span<const double> h) {
    Graph graph;
    const auto out = evaluate_single(graph, params, alpha, h, false);
    return graph.value(out.f).item();
}

std::vector<double> quantile(const PicnnParams& params, std::span<const double> alpha, std::span<const double> h) {
    Graph graph;
    const auto out = evaluate_single(graph, params, alpha, h, true);
    return graph.value(out.q).values();
}

RowMatrix sample_levels(std::size_t rows, std::size_t tau, std::uint64_t seed) {
    Rng rng(seed);
    RowMatrix levels(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(tau));
    for (Eigen::Index i = 0; i < levels.size(); ++i) levels.data()[i] = rng.uniform();
    return levels;
}

ScenarioSet sample_scenarios(const PicnnParams& params, std::span<const double> h, std::size_t m, std::uint64_t seed) {
    if (m == 0) throw ContractError("scenario count must be at least 1");
    params.config.validate();
    params.check_nonnegative();
    if (h.size() != params.config.context_dim) throw ContractError("PICNN context has the wrong width");
    Graph graph;
    const auto vars = bind(graph, params, false, "picnn.");
    const Var alpha = graph.constant(Tensor::from_matrix(sample_levels(m, params.config.tau, seed)));
    const Var row = graph.constant(Tensor::row({h.begin(), h.end()}));
    const auto out = forward(graph, vars, alpha, graph.repeat_rows(row, m), true);
    return {graph.value(out.q).to_matrix(), seed};
}

}  // namespace coherentcast
