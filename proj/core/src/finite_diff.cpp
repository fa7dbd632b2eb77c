#include "coherentcast/finite_diff.hpp"

#include <vector>

#include "coherentcast/errors.hpp"

namespace coherentcast {

Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x, double eps) {
    if (!(eps > 0.0)) throw ContractError("finite difference step must be positive");
    std::vector<double> grad(x.size());
    std::vector<double> probe = x.values();
    for (std::size_t i = 0; i < probe.size(); ++i) {
        const double saved = probe[i];
        probe[i] = saved + eps;
        const double up = f(Tensor(x.shape(), probe));
        probe[i] = saved - eps;
        const double down = f(Tensor(x.shape(), probe));
        probe[i] = saved;
        grad[i] = (up - down) / (2.0 * eps);
    }
    return Tensor(x.shape(), std::move(grad));
}

}  // namespace coherentcast
