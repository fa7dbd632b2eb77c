#include "coherentcast/adam.hpp"

#include <cmath>
#include <vector>

#include "coherentcast/errors.hpp"

namespace coherentcast {

void adam_step(AdamState& state, ParameterMap& params, const GradientMap& grads) {
    for (const auto& [name, grad] : grads) {
        const auto it = params.find(name);
        if (it == params.end()) throw ContractError("gradient for unknown parameter '" + name + "'");
        if (it->second.size() != grad.size()) {
            throw ContractError("gradient shape mismatch for parameter '" + name + "'");
        }
    }

    const auto& cfg = state.config;
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(cfg.beta1, t);
    const double correction2 = 1.0 - std::pow(cfg.beta2, t);

    for (const auto& [name, grad] : grads) {
        Tensor& param = params.at(name);
        auto m_it = state.first_moment.find(name);
        if (m_it == state.first_moment.end()) {
            m_it = state.first_moment.emplace(name, Tensor::zeros(param.shape())).first;
            state.second_moment.emplace(name, Tensor::zeros(param.shape()));
        }
        const auto& m_old = m_it->second.values();
        const auto& v_old = state.second_moment.at(name).values();
        const auto& g = grad.values();
        const auto& p_old = param.values();

        std::vector<double> m(p_old.size()), v(p_old.size()), p(p_old.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = cfg.beta1 * m_old[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v_old[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double m_hat = m[i] / correction1;
            const double v_hat = v[i] / correction2;
            p[i] = p_old[i] - cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
        }
        m_it->second = Tensor(param.shape(), std::move(m));
        state.second_moment.at(name) = Tensor(param.shape(), std::move(v));
        param = Tensor(param.shape(), std::move(p));
    }
}

}  // namespace coherentcast
