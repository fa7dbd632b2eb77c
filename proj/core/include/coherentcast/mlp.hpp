#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "coherentcast/adam.hpp"
#include "coherentcast/graph.hpp"

namespace coherentcast {

/// Fully connected ReLU network; the output layer is linear.
struct MlpParams {
    std::vector<std::size_t> sizes;  ///< input, hidden..., output
    std::vector<Tensor> weights;     ///< sizes[i] x sizes[i+1]
    std::vector<Tensor> biases;      ///< 1 x sizes[i+1]

    static MlpParams init(std::vector<std::size_t> sizes, std::uint64_t seed);

    void export_to(ParameterMap& out, const std::string& prefix) const;
    static MlpParams import_from(const ParameterMap& in, const std::string& prefix, std::vector<std::size_t> sizes);
};

/// Batched forward pass on the graph: input is N x sizes.front().
Var mlp_forward(Graph& graph, const MlpParams& params, bool trainable, const std::string& prefix, Var input);
std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input);

/// Quantile levels 0.05, 0.10, ..., 0.95.
std::vector<double> mlp_levels();

/**
 * @brief Value at level u of a piecewise-linear quantile curve.
 *
 * `quantiles` are predictions at `levels` (sorted internally, so crossings are
 * repaired); u below the first level or above the last takes the end value.
 */
double interpolate_quantile(std::vector<double> quantiles, std::span<const double> levels, double u);

}  // namespace coherentcast
