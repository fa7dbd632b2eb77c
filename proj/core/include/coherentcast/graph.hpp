#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "coherentcast/activation.hpp"
#include "coherentcast/tensor.hpp"

namespace coherentcast {

/// Handle to a node of a Graph. Only meaningful for the graph that created it.
struct Var {
    std::size_t id = 0;
};

using GradientMap = std::map<std::string, Tensor>;

/**
 * @brief Append-only reverse-mode differentiation tape over 2-D tensors.
 *
 * Each operation evaluates eagerly, caches its value plus whatever local
 * derivative it needs, and records its parents. Parents always precede
 * children, so the tape is acyclic by construction. backward() may run once
 * per tape; build a fresh Graph for every forward evaluation.
 *
 * Rank-1 values are treated as 1 x n rows; results are always rank 2.
 * A Graph is not thread-safe; independent graphs may live on different threads.
 */
class Graph {
public:
    enum class Op {
        constant,
        parameter,
        matmul,
        add,
        add_row,
        sub,
        mul,
        scale,
        add_scalar,
        activation,
        activation_slope,
        repeat_rows,
        row_sum,
        sum,
        reshape,
        concat_cols,
        slice_rows,
        slice_cols,
        energy_score,
        pinball,
    };

    Var constant(Tensor value);
    /// Named leaf whose gradient backward() reports. Names must be unique within a graph.
    Var parameter(const std::string& name, Tensor value);

    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    /// Adds a 1 x c row to every row of an r x c matrix.
    Var add_row(Var a, Var row);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double factor);
    Var add_scalar(Var a, double offset);
    Var activation(Activation kind, Var a);
    /// Elementwise g'(a); differentiable, so tangents built from it can be back-propagated.
    Var activation_slope(Activation kind, Var a);
    /// Each row of `a` repeated `times` times consecutively.
    Var repeat_rows(Var a, std::size_t times);
    Var row_sum(Var a);
    Var sum(Var a);
    Var reshape(Var a, std::size_t rows, std::size_t cols);
    Var concat_cols(Var a, Var b);
    Var slice_rows(Var a, std::size_t start, std::size_t count);
    Var slice_cols(Var a, std::size_t start, std::size_t count);
    /// Energy score of the m x d sample matrix against the fixed observation (length d).
    Var energy_score(Var samples, std::span<const double> observation, double beta);
    /// Mean pinball loss of an N x K prediction matrix; column k predicts level levels[k].
    Var pinball(Var predictions, const Tensor& targets, std::span<const double> levels);

    const Tensor& value(Var v) const;
    std::size_t size() const noexcept { return nodes_.size(); }
    Op op(Var v) const;

    /// Gradient of a scalar output with respect to every parameter leaf.
    /// Throws ContractError for non-scalar outputs or a second call on the same tape.
    GradientMap backward(Var output);

private:
    struct Node {
        Op op;
        std::size_t parents[2] = {0, 0};
        std::size_t parent_count = 0;
        Tensor value;
        RowMatrix local;  // cached local derivative, meaning depends on op
        Activation kind = Activation::relu;
        double scalar = 0.0;
        std::size_t index0 = 0;
        std::size_t index1 = 0;
        bool needs_grad = false;
        std::string name;
    };

    Var push(Node node);
    const Node& node(Var v) const;
    void check_owned(Var v) const;

    std::vector<Node> nodes_;
    std::map<std::string, std::size_t> parameters_;
    bool backward_done_ = false;
};

}  // namespace coherentcast
