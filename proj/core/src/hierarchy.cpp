#include "coherentcast/hierarchy.hpp"

#include "coherentcast/errors.hpp"

namespace coherentcast {

Hierarchy::Hierarchy(Eigen::MatrixXd summing) : summing_(std::move(summing)) {
    if (summing_.rows() == 0 || summing_.cols() == 0) throw ConfigError("summing matrix must be non-empty");
    for (Eigen::Index r = 0; r < summing_.rows(); ++r) {
        bool any = false;
        for (Eigen::Index c = 0; c < summing_.cols(); ++c) {
            const double v = summing_(r, c);
            if (v != 0.0 && v != 1.0) throw ConfigError("summing matrix entries must be 0 or 1");
            any = any || v == 1.0;
        }
        if (!any) throw ConfigError("summing matrix row " + std::to_string(r) + " is all zeros");
    }
    const auto k = summing_.rows();
    const auto n = summing_.cols();
    basis_.resize(k + n, n);
    basis_ << summing_, Eigen::MatrixXd::Identity(n, n);
}

Hierarchy Hierarchy::single_level(std::size_t bottom_count) {
    return Hierarchy(Eigen::MatrixXd::Ones(1, static_cast<Eigen::Index>(bottom_count)));
}

Eigen::MatrixXd Hierarchy::constraints() const {
    const auto k = summing_.rows();
    Eigen::MatrixXd c(k, k + summing_.cols());
    c << Eigen::MatrixXd::Identity(k, k), -summing_;
    return c;
}

double Hierarchy::coherency_gap(const Eigen::VectorXd& x) const {
    if (static_cast<std::size_t>(x.size()) != dimension()) throw ContractError("vector does not match the hierarchy");
    const auto k = summing_.rows();
    return (x.head(k) - summing_ * x.tail(summing_.cols())).cwiseAbs().maxCoeff();
}

}  // namespace coherentcast
