#pragma once

#include <functional>

#include "coherentcast/tensor.hpp"

namespace coherentcast {

/// Central-difference gradient (f(x + eps e_i) - f(x - eps e_i)) / (2 eps), one coordinate at a time.
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x, double eps);

}  // namespace coherentcast
