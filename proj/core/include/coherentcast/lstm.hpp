#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coherentcast/adam.hpp"
#include "coherentcast/graph.hpp"

namespace coherentcast {

/// Gate weights of one stacked LSTM layer. Inputs multiply from the left: x (1 x in) * W (in x H).
struct LstmLayer {
    Tensor w_ix, w_ih, b_i;
    Tensor w_fx, w_fh, b_f;
    Tensor w_ox, w_oh, b_o;
    Tensor w_cx, w_ch, b_c;
};

struct LstmParams {
    std::size_t input_size = 0;
    std::size_t hidden_size = 100;
    std::vector<LstmLayer> layers;

    /// Uniform(-1/sqrt(H), 1/sqrt(H)) weights and biases from the seed.
    static LstmParams init(std::size_t input_size, std::size_t hidden_size, std::size_t layer_count,
                           std::uint64_t seed);
    static LstmParams zeros(std::size_t input_size, std::size_t hidden_size, std::size_t layer_count);

    /// Throws ContractError when shapes are inconsistent across layers.
    void validate() const;

    void export_to(ParameterMap& out, const std::string& prefix) const;
    static LstmParams import_from(const ParameterMap& in, const std::string& prefix, std::size_t input_size,
                                  std::size_t hidden_size, std::size_t layer_count);
};

struct LayerState {
    std::vector<double> h;
    std::vector<double> c;
};

/// Per-layer (h, c).
struct HiddenState {
    std::vector<LayerState> layers;

    static HiddenState zeros(const LstmParams& params);
    const std::vector<double>& top() const { return layers.back().h; }
};

/// One time step through every stacked layer; layer l's h feeds layer l + 1.
HiddenState lstm_step(const LstmParams& params, std::span<const double> x, const HiddenState& state);

/// Top-layer h after consuming every context row in order, starting from zero state.
std::vector<double> encode(const LstmParams& params, const RowMatrix& context);

/// LSTM parameters bound to a graph, as parameters (trainable) or constants.
struct LstmVars {
    struct Layer {
        Var w_ix, w_ih, b_i, w_fx, w_fh, b_f, w_ox, w_oh, b_o, w_cx, w_ch, b_c;
    };
    std::size_t hidden_size = 0;
    std::vector<Layer> layers;
};

LstmVars bind(Graph& graph, const LstmParams& params, bool trainable, const std::string& prefix);

/// Batched encoder on the graph: returns the B x H top-layer state for B equally long contexts.
Var encode(Graph& graph, const LstmVars& vars, const std::vector<const RowMatrix*>& contexts);

}  // namespace coherentcast
