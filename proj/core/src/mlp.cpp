#include "coherentcast/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "coherentcast/errors.hpp"
#include "coherentcast/random.hpp"

namespace coherentcast {

MlpParams MlpParams::init(std::vector<std::size_t> sizes, std::uint64_t seed) {
    if (sizes.size() < 2) throw ContractError("MLP needs input and output sizes");
    Rng rng(seed);
    MlpParams p;
    p.sizes = std::move(sizes);
    for (std::size_t i = 0; i + 1 < p.sizes.size(); ++i) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(p.sizes[i]));
        std::vector<double> w(p.sizes[i] * p.sizes[i + 1]);
        for (auto& v : w) v = rng.uniform(-bound, bound);
        std::vector<double> b(p.sizes[i + 1]);
        for (auto& v : b) v = rng.uniform(-bound, bound);
        p.weights.push_back(Tensor::matrix(p.sizes[i], p.sizes[i + 1], std::move(w)));
        p.biases.push_back(Tensor::matrix(1, p.sizes[i + 1], std::move(b)));
    }
    return p;
}

void MlpParams::export_to(ParameterMap& out, const std::string& prefix) const {
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out[prefix + std::to_string(i) + ".w"] = weights[i];
        out[prefix + std::to_string(i) + ".b"] = biases[i];
    }
}

MlpParams MlpParams::import_from(const ParameterMap& in, const std::string& prefix, std::vector<std::size_t> sizes) {
    MlpParams p;
    p.sizes = std::move(sizes);
    for (std::size_t i = 0; i + 1 < p.sizes.size(); ++i) {
        const auto w = in.find(prefix + std::to_string(i) + ".w");
        const auto b = in.find(prefix + std::to_string(i) + ".b");
        if (w == in.end() || b == in.end()) throw ContractError("MLP parameter missing for layer " + std::to_string(i));
        if (w->second.size() != p.sizes[i] * p.sizes[i + 1] || b->second.size() != p.sizes[i + 1]) {
            throw ContractError("MLP layer " + std::to_string(i) + " has the wrong size");
        }
        p.weights.push_back(w->second.reshaped({p.sizes[i], p.sizes[i + 1]}));
        p.biases.push_back(b->second.reshaped({1, p.sizes[i + 1]}));
    }
    return p;
}

Var mlp_forward(Graph& graph, const MlpParams& params, bool trainable, const std::string& prefix, Var input) {
    Var x = input;
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        const auto name = prefix + std::to_string(i);
        const Var w = trainable ? graph.parameter(name + ".w", params.weights[i]) : graph.constant(params.weights[i]);
        const Var b = trainable ? graph.parameter(name + ".b", params.biases[i]) : graph.constant(params.biases[i]);
        x = graph.add_row(graph.matmul(x, w), b);
        if (i + 1 < params.weights.size()) x = graph.activation(Activation::relu, x);
    }
    return x;
}

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input) {
    if (input.size() != params.sizes.front()) throw ContractError("MLP input has the wrong width");
    RowMatrix x = Eigen::Map<const RowMatrix>(input.data(), 1, static_cast<Eigen::Index>(input.size()));
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        x = (x * params.weights[i].as_matrix()) + params.biases[i].as_matrix();
        if (i + 1 < params.weights.size()) x = x.cwiseMax(0.0);
    }
    return {x.data(), x.data() + x.size()};
}

std::vector<double> mlp_levels() {
    std::vector<double> out;
    for (int k = 1; k <= 19; ++k) out.push_back(0.05 * k);
    return out;
}

double interpolate_quantile(std::vector<double> quantiles, std::span<const double> levels, double u) {
    if (quantiles.empty() || quantiles.size() != levels.size()) throw ContractError("quantile curve and levels differ in length");
    std::sort(quantiles.begin(), quantiles.end());
    if (u <= levels.front()) return quantiles.front();
    if (u >= levels.back()) return quantiles.back();
    const auto it = std::upper_bound(levels.begin(), levels.end(), u);
    const auto hi = static_cast<std::size_t>(it - levels.begin());
    const auto lo = hi - 1;
    const double t = (u - levels[lo]) / (levels[hi] - levels[lo]);
    return quantiles[lo] + t * (quantiles[hi] - quantiles[lo]);
}

}  // namespace coherentcast
