#include "coherentcast/activation.hpp"

#include <cmath>
#include <numbers>

#include "coherentcast/errors.hpp"

namespace coherentcast {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

namespace {

double sigmoid(double x) {
    // Split by sign so exp never overflows.
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

double eval_activation(Activation kind, double x) {
    switch (kind) {
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::gaussian_softplus: return x * normal_cdf(x) + normal_pdf(x);
        case Activation::sigmoid: return sigmoid(x);
        case Activation::tanh: return std::tanh(x);
    }
    throw ConfigError("unknown activation kind");
}

double activation_derivative(Activation kind, double x) {
    switch (kind) {
        case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::gaussian_softplus: return normal_cdf(x);
        case Activation::sigmoid: {
            const double s = sigmoid(x);
            return s * (1.0 - s);
        }
        case Activation::tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
    }
    throw ConfigError("unknown activation kind");
}

double activation_second_derivative(Activation kind, double x) {
    switch (kind) {
        case Activation::relu: return 0.0;
        case Activation::gaussian_softplus: return normal_pdf(x);
        case Activation::sigmoid: {
            const double s = sigmoid(x);
            return s * (1.0 - s) * (1.0 - 2.0 * s);
        }
        case Activation::tanh: {
            const double t = std::tanh(x);
            return -2.0 * t * (1.0 - t * t);
        }
    }
    throw ConfigError("unknown activation kind");
}

bool is_convex_nondecreasing(Activation kind) noexcept {
    return kind == Activation::relu || kind == Activation::gaussian_softplus;
}

Activation parse_activation(std::string_view name) {
    if (name == "relu" || name == "r") return Activation::relu;
    if (name == "gaussian-softplus" || name == "gaussian_softplus" || name == "g") return Activation::gaussian_softplus;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    throw ConfigError("unknown activation '" + std::string(name) + "'");
}

std::string to_string(Activation kind) {
    switch (kind) {
        case Activation::relu: return "relu";
        case Activation::gaussian_softplus: return "gaussian-softplus";
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh: return "tanh";
    }
    return "unknown";
}

char activation_code(Activation kind) {
    switch (kind) {
        case Activation::relu: return 'r';
        case Activation::gaussian_softplus: return 'g';
        case Activation::sigmoid: return 's';
        case Activation::tanh: return 't';
    }
    return '?';
}

}  // namespace coherentcast
