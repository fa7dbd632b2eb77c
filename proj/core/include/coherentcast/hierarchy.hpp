#pragma once

#include <span>

#include <Eigen/Dense>

namespace coherentcast {

/**
 * @brief Aggregation structure y = S z.
 *
 * Vectors are ordered x = [y (k aggregates), z (n bottom series)]. S is k x n
 * with entries in {0, 1} and no zero rows.
 */
class Hierarchy {
public:
    explicit Hierarchy(Eigen::MatrixXd summing);
    /// One aggregate that sums all n bottom series.
    static Hierarchy single_level(std::size_t bottom_count);

    std::size_t aggregate_count() const noexcept { return static_cast<std::size_t>(summing_.rows()); }
    std::size_t bottom_count() const noexcept { return static_cast<std::size_t>(summing_.cols()); }
    std::size_t dimension() const noexcept { return aggregate_count() + bottom_count(); }

    const Eigen::MatrixXd& summing() const noexcept { return summing_; }
    /// M = [S; I], so every coherent vector is M z.
    const Eigen::MatrixXd& basis() const noexcept { return basis_; }
    /// C = [I, -S]; coherent vectors satisfy C x = 0.
    Eigen::MatrixXd constraints() const;

    /// max_r |y_r - (S z)_r|
    double coherency_gap(const Eigen::VectorXd& x) const;
    Eigen::VectorXd expand(const Eigen::VectorXd& bottom) const { return basis_ * bottom; }

private:
    Eigen::MatrixXd summing_;
    Eigen::MatrixXd basis_;
};

}  // namespace coherentcast
