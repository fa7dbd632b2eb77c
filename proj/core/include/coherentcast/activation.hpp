#pragma once

#include <string>
#include <string_view>

namespace coherentcast {

enum class Activation { relu, gaussian_softplus, sigmoid, tanh };

/// Standard normal CDF via erfc; absolute error well below 1e-12.
double normal_cdf(double x);
double normal_pdf(double x);

/// g(x). Gaussian softplus is x * Phi(x) + phi(x), whose derivative is Phi(x).
double eval_activation(Activation kind, double x);
/// g'(x). ReLU uses the subgradient 0 at x = 0.
double activation_derivative(Activation kind, double x);
/// g''(x). ReLU has g'' = 0 everywhere away from the kink.
double activation_second_derivative(Activation kind, double x);

/// True for the kinds allowed on the convex (alpha) path of a PICNN.
bool is_convex_nondecreasing(Activation kind) noexcept;

/// Accepts "relu", "gaussian-softplus", "sigmoid", "tanh" and the one-letter codes r / g.
/// Throws ConfigError for anything else.
Activation parse_activation(std::string_view name);
std::string to_string(Activation kind);
char activation_code(Activation kind);

}  // namespace coherentcast
