#include "coherentcast/tensor.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "coherentcast/errors.hpp"

namespace coherentcast {

std::size_t element_count(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor() : shape_{0}, data_{} {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (element_count(shape_) != data_.size()) {
        throw ContractError("tensor shape holds " + std::to_string(element_count(shape_)) +
                            " elements but " + std::to_string(data_.size()) + " were given");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw NumericalError("non-finite tensor entry at flat index " + std::to_string(i));
        }
    }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) { return filled(std::move(shape), 0.0); }

Tensor Tensor::filled(std::vector<std::size_t> shape, double value) {
    const auto n = element_count(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor({}, {value}); }

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
    return Tensor({rows, cols}, std::move(data));
}

Tensor Tensor::row(std::vector<double> data) {
    const auto n = data.size();
    return Tensor({1, n}, std::move(data));
}

Tensor Tensor::from_matrix(const RowMatrix& m) {
    std::vector<double> data(m.data(), m.data() + m.size());
    return matrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()), std::move(data));
}

Tensor Tensor::from_matrix(const Eigen::MatrixXd& m) { return from_matrix(RowMatrix(m)); }

std::size_t Tensor::rows() const noexcept {
    if (shape_.size() < 2) return 1;
    return shape_[0];
}

std::size_t Tensor::cols() const noexcept {
    if (shape_.empty()) return 1;
    if (shape_.size() == 1) return shape_[0];
    return element_count(shape_) / (shape_[0] == 0 ? 1 : shape_[0]);
}

double Tensor::at(std::size_t r, std::size_t c) const {
    if (r >= rows() || c >= cols()) throw ContractError("tensor index out of range");
    return data_[r * cols() + c];
}

double Tensor::item() const {
    if (data_.size() != 1) throw ContractError("item() on a tensor with " + std::to_string(data_.size()) + " elements");
    return data_[0];
}

ConstMatrixMap Tensor::as_matrix() const {
    return ConstMatrixMap(data_.data(), static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols()));
}

RowMatrix Tensor::to_matrix() const { return as_matrix(); }

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const { return Tensor(std::move(shape), data_); }

}  // namespace coherentcast
