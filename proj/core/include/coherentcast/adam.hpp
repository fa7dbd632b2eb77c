#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "coherentcast/graph.hpp"

namespace coherentcast {

using ParameterMap = std::map<std::string, Tensor>;

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Moment estimates keyed by parameter name; created lazily as zeros on first use.
struct AdamState {
    AdamConfig config;
    std::map<std::string, Tensor> first_moment;
    std::map<std::string, Tensor> second_moment;
    std::uint64_t step = 0;
};

/// One bias-corrected Adam update of every parameter that has a gradient.
/// Throws ContractError when a gradient names an unknown parameter or has a different shape.
void adam_step(AdamState& state, ParameterMap& params, const GradientMap& grads);

}  // namespace coherentcast
