#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coherentcast/adam.hpp"
#include "coherentcast/graph.hpp"

namespace coherentcast {

struct PicnnConfig {
    std::size_t context_dim = 0;   ///< width of u_0 (encoder state plus any appended covariates)
    std::size_t tau = 24;          ///< dimension of the quantile-level vector alpha
    std::size_t hidden = 40;
    std::size_t layers = 2;
    std::size_t output_width = 0;  ///< width of v_k; 0 means `hidden`
    std::vector<Activation> v_activations;  ///< one per layer, each convex non-decreasing
    Activation u_activation = Activation::tanh;

    std::size_t final_width() const noexcept { return output_width == 0 ? hidden : output_width; }
    /// Throws ConfigError for zero sizes, a wrong activation count, or a non-convex alpha-path activation.
    void validate() const;
};

/// Activation string such as "rg" (ReLU then Gaussian softplus), one letter per layer.
std::vector<Activation> parse_activation_string(const std::string& code);
std::string activation_string(const std::vector<Activation>& acts);

/**
 * One layer of the partially input-convex network:
 *
 *   u' = g_u(u W_uu + b_uu)
 *   v' = g_v( (v .* relu(u W_vu + b_vu)) W_v + (alpha .* relu(u W_au + b_au)) W_a + u W_u + b_v )
 *
 * with W_v, W_a >= 0 elementwise. The u-path of the last layer never reaches the
 * output, so that layer carries no W_uu / b_uu.
 */
struct PicnnLayer {
    Tensor w_uu, b_uu;
    Tensor w_v;
    Tensor w_vu, b_vu;
    Tensor w_a;
    Tensor w_au, b_au;
    Tensor w_u, b_v;
};

struct PicnnParams {
    PicnnConfig config;
    std::vector<PicnnLayer> layers;

    static PicnnParams init(const PicnnConfig& config, std::uint64_t seed);
    static PicnnParams zeros(const PicnnConfig& config);

    /// Throws InvariantError when any entry of a W_v or W_a is negative.
    void check_nonnegative() const;

    void export_to(ParameterMap& out, const std::string& prefix) const;
    static PicnnParams import_from(const ParameterMap& in, const std::string& prefix, const PicnnConfig& config);
};

/// Names (within export_to's scheme) of the sign-constrained matrices.
bool is_nonnegative_parameter(const std::string& name);

/// Clamps every W_v / W_a entry to max(entry, 0); everything else untouched. Idempotent.
PicnnParams project_weights(PicnnParams params);
/// Same projection on an exported parameter map, for use after an optimizer step.
void project_weights(ParameterMap& params);

/// f(alpha, h): sum of the final layer's v entries.
double picnn_forward(const PicnnParams& params, std::span<const double> alpha, std::span<const double> h);

/// q(alpha | h) = grad_alpha f, via forward-mode tangents (exact).
std::vector<double> quantile(const PicnnParams& params, std::span<const double> alpha, std::span<const double> h);

/// m x tau scenario matrix for one context, alpha ~ U(0,1)^tau from the seed.
struct ScenarioSet {
    RowMatrix samples;
    std::uint64_t seed = 0;

    std::size_t count() const noexcept { return static_cast<std::size_t>(samples.rows()); }
};

/// Throws ContractError for m = 0.
ScenarioSet sample_scenarios(const PicnnParams& params, std::span<const double> h, std::size_t m, std::uint64_t seed);

/// Draws an N x tau matrix of i.i.d. uniform levels strictly inside (0, 1).
RowMatrix sample_levels(std::size_t rows, std::size_t tau, std::uint64_t seed);

struct PicnnVars {
    struct Layer {
        Var w_uu, b_uu, w_v, w_vu, b_vu, w_a, w_au, b_au, w_u, b_v;
        bool has_u_path = false;
    };
    PicnnConfig config;
    std::vector<Layer> layers;
};

PicnnVars bind(Graph& graph, const PicnnParams& params, bool trainable, const std::string& prefix);

struct PicnnOutput {
    Var f;  ///< N x 1
    Var q;  ///< N x tau, only when tangents were requested
};

/**
 * @brief Batched forward pass on the graph.
 *
 * alpha is N x tau, context is N x context_dim. With `with_quantile`, tau
 * tangent directions ride along as (N * tau)-row graph nodes so that q is an
 * ordinary differentiable node. Throws DomainError for alpha outside (0,1).
 */
PicnnOutput forward(Graph& graph, const PicnnVars& vars, Var alpha, Var context, bool with_quantile);

}  // namespace coherentcast
