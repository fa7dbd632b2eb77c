#include "coherentcast/lstm.hpp"

#include <cmath>

#include "coherentcast/errors.hpp"
#include "coherentcast/random.hpp"

namespace coherentcast {

namespace {

Tensor uniform_tensor(Rng& rng, std::size_t rows, std::size_t cols, double bound) {
    std::vector<double> data(rows * cols);
    for (auto& v : data) v = rng.uniform(-bound, bound);
    return Tensor::matrix(rows, cols, std::move(data));
}

struct GateSlot {
    const char* name;
    Tensor LstmLayer::*member;
    bool input_side;  // rows = layer input size
    bool bias;
};

constexpr GateSlot kSlots[] = {
    {"w_ix", &LstmLayer::w_ix, true, false},  {"w_ih", &LstmLayer::w_ih, false, false}, {"b_i", &LstmLayer::b_i, false, true},
    {"w_fx", &LstmLayer::w_fx, true, false},  {"w_fh", &LstmLayer::w_fh, false, false}, {"b_f", &LstmLayer::b_f, false, true},
    {"w_ox", &LstmLayer::w_ox, true, false},  {"w_oh", &LstmLayer::w_oh, false, false}, {"b_o", &LstmLayer::b_o, false, true},
    {"w_cx", &LstmLayer::w_cx, true, false},  {"w_ch", &LstmLayer::w_ch, false, false}, {"b_c", &LstmLayer::b_c, false, true},
};

std::size_t layer_input(const LstmParams& p, std::size_t l) { return l == 0 ? p.input_size : p.hidden_size; }

std::vector<std::size_t> slot_shape(const GateSlot& s, std::size_t in, std::size_t hidden) {
    if (s.bias) return {1, hidden};
    return {s.input_side ? in : hidden, hidden};
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

LstmParams LstmParams::init(std::size_t input_size, std::size_t hidden_size, std::size_t layer_count,
                            std::uint64_t seed) {
    if (input_size == 0 || hidden_size == 0 || layer_count == 0) throw ConfigError("LSTM sizes must be positive");
    Rng rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
    LstmParams p;
    p.input_size = input_size;
    p.hidden_size = hidden_size;
    for (std::size_t l = 0; l < layer_count; ++l) {
        LstmLayer layer;
        for (const auto& s : kSlots) {
            const auto shape = slot_shape(s, layer_input(p, l), hidden_size);
            layer.*s.member = uniform_tensor(rng, shape[0], shape[1], bound);
        }
        p.layers.push_back(std::move(layer));
    }
    return p;
}

LstmParams LstmParams::zeros(std::size_t input_size, std::size_t hidden_size, std::size_t layer_count) {
    LstmParams p;
    p.input_size = input_size;
    p.hidden_size = hidden_size;
    for (std::size_t l = 0; l < layer_count; ++l) {
        LstmLayer layer;
        for (const auto& s : kSlots) layer.*s.member = Tensor::zeros(slot_shape(s, layer_input(p, l), hidden_size));
        p.layers.push_back(std::move(layer));
    }
    return p;
}

void LstmParams::validate() const {
    if (layers.empty()) throw ContractError("LSTM has no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        for (const auto& s : kSlots) {
            const auto& t = layers[l].*s.member;
            const auto shape = slot_shape(s, layer_input(*this, l), hidden_size);
            if (t.rows() != shape[0] || t.cols() != shape[1]) {
                throw ContractError("LSTM layer " + std::to_string(l) + " parameter " + s.name + " has the wrong shape");
            }
        }
    }
}

void LstmParams::export_to(ParameterMap& out, const std::string& prefix) const {
    for (std::size_t l = 0; l < layers.size(); ++l) {
        for (const auto& s : kSlots) out[prefix + std::to_string(l) + "." + s.name] = layers[l].*s.member;
    }
}

LstmParams LstmParams::import_from(const ParameterMap& in, const std::string& prefix, std::size_t input_size,
                                   std::size_t hidden_size, std::size_t layer_count) {
    LstmParams p;
    p.input_size = input_size;
    p.hidden_size = hidden_size;
    for (std::size_t l = 0; l < layer_count; ++l) {
        LstmLayer layer;
        for (const auto& s : kSlots) {
            const auto key = prefix + std::to_string(l) + "." + s.name;
            const auto it = in.find(key);
            if (it == in.end()) throw ContractError("missing LSTM parameter '" + key + "'");
            const auto shape = slot_shape(s, layer_input(p, l), hidden_size);
            layer.*s.member = it->second.reshaped(shape);
        }
        p.layers.push_back(std::move(layer));
    }
    p.validate();
    return p;
}

HiddenState HiddenState::zeros(const LstmParams& params) {
    HiddenState s;
    s.layers.assign(params.layers.size(),
                    LayerState{std::vector<double>(params.hidden_size, 0.0), std::vector<double>(params.hidden_size, 0.0)});
    return s;
}

HiddenState lstm_step(const LstmParams& params, std::span<const double> x, const HiddenState& state) {
    if (x.size() != params.input_size) {
        throw ContractError("LSTM input has " + std::to_string(x.size()) + " entries, expected " +
                            std::to_string(params.input_size));
    }
    if (state.layers.size() != params.layers.size()) throw ContractError("hidden state has the wrong layer count");
    const auto H = static_cast<Eigen::Index>(params.hidden_size);

    HiddenState next;
    Eigen::RowVectorXd input = Eigen::Map<const Eigen::RowVectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const auto& L = params.layers[l];
        const auto& prev = state.layers[l];
        if (prev.h.size() != params.hidden_size || prev.c.size() != params.hidden_size) {
            throw ContractError("hidden state has the wrong width");
        }
        const Eigen::Map<const Eigen::RowVectorXd> h(prev.h.data(), H);
        const Eigen::Map<const Eigen::RowVectorXd> c(prev.c.data(), H);
        auto pre = [&](const Tensor& wx, const Tensor& wh, const Tensor& b) -> Eigen::RowVectorXd {
            return input * wx.as_matrix() + h * wh.as_matrix() + b.as_matrix().row(0);
        };
        const Eigen::RowVectorXd zi = pre(L.w_ix, L.w_ih, L.b_i);
        const Eigen::RowVectorXd zf = pre(L.w_fx, L.w_fh, L.b_f);
        const Eigen::RowVectorXd zo = pre(L.w_ox, L.w_oh, L.b_o);
        const Eigen::RowVectorXd zc = pre(L.w_cx, L.w_ch, L.b_c);
        LayerState out{std::vector<double>(params.hidden_size), std::vector<double>(params.hidden_size)};
        for (Eigen::Index k = 0; k < H; ++k) {
            const double i = sigmoid(zi[k]);
            const double f = sigmoid(zf[k]);
            const double o = sigmoid(zo[k]);
            const double cell = i * std::tanh(zc[k]) + f * c[k];
            out.c[static_cast<std::size_t>(k)] = cell;
            out.h[static_cast<std::size_t>(k)] = o * std::tanh(cell);
        }
        input = Eigen::Map<const Eigen::RowVectorXd>(out.h.data(), H);
        next.layers.push_back(std::move(out));
    }
    return next;
}

std::vector<double> encode(const LstmParams& params, const RowMatrix& context) {
    if (context.rows() == 0) throw ContractError("cannot encode an empty context");
    auto state = HiddenState::zeros(params);
    for (Eigen::Index t = 0; t < context.rows(); ++t) {
        const Eigen::RowVectorXd row = context.row(t);
        state = lstm_step(params, std::span<const double>(row.data(), static_cast<std::size_t>(row.size())), state);
    }
    return state.top();
}

LstmVars bind(Graph& graph, const LstmParams& params, bool trainable, const std::string& prefix) {
    params.validate();
    LstmVars vars;
    vars.hidden_size = params.hidden_size;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const auto& L = params.layers[l];
        auto put = [&](const char* name, const Tensor& t) {
            return trainable ? graph.parameter(prefix + std::to_string(l) + "." + name, t) : graph.constant(t);
        };
        LstmVars::Layer v{put("w_ix", L.w_ix), put("w_ih", L.w_ih), put("b_i", L.b_i),
                          put("w_fx", L.w_fx), put("w_fh", L.w_fh), put("b_f", L.b_f),
                          put("w_ox", L.w_ox), put("w_oh", L.w_oh), put("b_o", L.b_o),
                          put("w_cx", L.w_cx), put("w_ch", L.w_ch), put("b_c", L.b_c)};
        vars.layers.push_back(v);
    }
    return vars;
}

Var encode(Graph& graph, const LstmVars& vars, const std::vector<const RowMatrix*>& contexts) {
    if (contexts.empty()) throw ContractError("cannot encode an empty batch");
    const auto steps = contexts.front()->rows();
    const auto width = contexts.front()->cols();
    if (steps == 0) throw ContractError("cannot encode an empty context");
    for (const auto* c : contexts) {
        if (c->rows() != steps || c->cols() != width) throw ContractError("batched contexts must share a shape");
    }
    const auto batch = static_cast<std::size_t>(contexts.size());
    const auto H = vars.hidden_size;

    std::vector<Var> h(vars.layers.size()), c(vars.layers.size());
    for (std::size_t l = 0; l < vars.layers.size(); ++l) {
        h[l] = graph.constant(Tensor::zeros({batch, H}));
        c[l] = graph.constant(Tensor::zeros({batch, H}));
    }
    RowMatrix x(static_cast<Eigen::Index>(batch), width);
    for (Eigen::Index t = 0; t < steps; ++t) {
        for (std::size_t b = 0; b < batch; ++b) x.row(static_cast<Eigen::Index>(b)) = contexts[b]->row(t);
        Var input = graph.constant(Tensor::from_matrix(x));
        for (std::size_t l = 0; l < vars.layers.size(); ++l) {
            const auto& L = vars.layers[l];
            auto pre = [&](Var wx, Var wh, Var b) {
                return graph.add_row(graph.add(graph.matmul(input, wx), graph.matmul(h[l], wh)), b);
            };
            const Var i = graph.activation(Activation::sigmoid, pre(L.w_ix, L.w_ih, L.b_i));
            const Var f = graph.activation(Activation::sigmoid, pre(L.w_fx, L.w_fh, L.b_f));
            const Var o = graph.activation(Activation::sigmoid, pre(L.w_ox, L.w_oh, L.b_o));
            const Var g = graph.activation(Activation::tanh, pre(L.w_cx, L.w_ch, L.b_c));
            c[l] = graph.add(graph.mul(i, g), graph.mul(f, c[l]));
            h[l] = graph.mul(o, graph.activation(Activation::tanh, c[l]));
            input = h[l];
        }
    }
    return h.back();
}

}  // namespace coherentcast
