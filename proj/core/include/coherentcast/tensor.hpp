#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace coherentcast {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

/**
 * @brief Immutable dense array of 64-bit floats in row-major order.
 *
 * Every entry is finite; construction rejects NaN and Inf with NumericalError.
 * Models only need rank 0..2, and the matrix helpers treat a rank-1 tensor of
 * length n as a 1 x n row.
 */
class Tensor {
public:
    Tensor();
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor zeros(std::vector<std::size_t> shape);
    static Tensor filled(std::vector<std::size_t> shape, double value);
    static Tensor scalar(double value);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    static Tensor row(std::vector<double> data);
    static Tensor from_matrix(const RowMatrix& m);
    static Tensor from_matrix(const Eigen::MatrixXd& m);

    const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t rows() const noexcept;
    std::size_t cols() const noexcept;

    std::span<const double> data() const noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }
    double operator[](std::size_t i) const { return data_[i]; }
    double at(std::size_t r, std::size_t c) const;
    double item() const;

    ConstMatrixMap as_matrix() const;
    RowMatrix to_matrix() const;

    Tensor reshaped(std::vector<std::size_t> shape) const;
    bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.shape_ == b.shape_ && a.data_ == b.data_;
    }

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

std::size_t element_count(const std::vector<std::size_t>& shape);

}  // namespace coherentcast
