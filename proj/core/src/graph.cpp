#include "coherentcast/graph.hpp"

#include <cmath>
#include <string>

#include "coherentcast/energy_score.hpp"
#include "coherentcast/errors.hpp"

namespace coherentcast {

namespace {

std::string shape_str(const Tensor& t) {
    return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

Tensor finite_or_throw(const RowMatrix& m, const char* op) {
    if (!m.allFinite()) throw NumericalError(std::string("non-finite value produced by ") + op);
    return Tensor::from_matrix(m);
}

}  // namespace

Var Graph::push(Node n) {
    for (std::size_t p = 0; p < n.parent_count; ++p) {
        if (nodes_[n.parents[p]].needs_grad) n.needs_grad = true;
    }
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
}

void Graph::check_owned(Var v) const {
    if (v.id >= nodes_.size()) throw ContractError("variable does not belong to this graph");
}

const Graph::Node& Graph::node(Var v) const {
    check_owned(v);
    return nodes_[v.id];
}

const Tensor& Graph::value(Var v) const { return node(v).value; }

Graph::Op Graph::op(Var v) const { return node(v).op; }

Var Graph::constant(Tensor value) {
    Node n;
    n.op = Op::constant;
    if (value.rank() < 2) value = value.reshaped({value.rows(), value.cols()});
    n.value = std::move(value);
    return push(std::move(n));
}

Var Graph::parameter(const std::string& name, Tensor value) {
    if (parameters_.count(name)) throw ContractError("duplicate parameter name '" + name + "'");
    Node n;
    n.op = Op::parameter;
    if (value.rank() < 2) value = value.reshaped({value.rows(), value.cols()});
    n.value = std::move(value);
    n.needs_grad = true;
    n.name = name;
    const Var v = push(std::move(n));
    parameters_[name] = v.id;
    return v;
}

Var Graph::matmul(Var a, Var b) {
    const auto& A = value(a);
    const auto& B = value(b);
    if (A.cols() != B.rows()) {
        throw ContractError("matmul shape mismatch " + shape_str(A) + " * " + shape_str(B));
    }
    Node n;
    n.op = Op::matmul;
    n.parents[0] = a.id;
    n.parents[1] = b.id;
    n.parent_count = 2;
    RowMatrix out = A.as_matrix() * B.as_matrix();
    n.value = finite_or_throw(out, "matmul");
    return push(std::move(n));
}

Var Graph::add(Var a, Var b) {
    const auto& A = value(a);
    const auto& B = value(b);
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw ContractError("add shape mismatch " + shape_str(A) + " + " + shape_str(B));
    }
    Node n;
    n.op = Op::add;
    n.parents[0] = a.id;
    n.parents[1] = b.id;
    n.parent_count = 2;
    RowMatrix out = A.as_matrix() + B.as_matrix();
    n.value = finite_or_throw(out, "add");
    return push(std::move(n));
}

Var Graph::add_row(Var a, Var row) {
    const auto& A = value(a);
    const auto& R = value(row);
    if (R.rows() != 1 || R.cols() != A.cols()) {
        throw ContractError("add_row expects a 1x" + std::to_string(A.cols()) + " row, got " + shape_str(R));
    }
    Node n;
    n.op = Op::add_row;
    n.parents[0] = a.id;
    n.parents[1] = row.id;
    n.parent_count = 2;
    RowMatrix out = A.as_matrix().rowwise() + R.as_matrix().row(0);
    n.value = finite_or_throw(out, "add_row");
    return push(std::move(n));
}

Var Graph::sub(Var a, Var b) {
    const auto& A = value(a);
    const auto& B = value(b);
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw ContractError("sub shape mismatch " + shape_str(A) + " - " + shape_str(B));
    }
    Node n;
    n.op = Op::sub;
    n.parents[0] = a.id;
    n.parents[1] = b.id;
    n.parent_count = 2;
    RowMatrix out = A.as_matrix() - B.as_matrix();
    n.value = finite_or_throw(out, "sub");
    return push(std::move(n));
}

Var Graph::mul(Var a, Var b) {
    const auto& A = value(a);
    const auto& B = value(b);
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw ContractError("mul shape mismatch " + shape_str(A) + " .* " + shape_str(B));
    }
    Node n;
    n.op = Op::mul;
    n.parents[0] = a.id;
    n.parents[1] = b.id;
    n.parent_count = 2;
    RowMatrix out = A.as_matrix().cwiseProduct(B.as_matrix());
    n.value = finite_or_throw(out, "mul");
    return push(std::move(n));
}

Var Graph::scale(Var a, double factor) {
    Node n;
    n.op = Op::scale;
    n.parents[0] = a.id;
    n.parent_count = 1;
    n.scalar = factor;
    RowMatrix out = value(a).as_matrix() * factor;
    n.value = finite_or_throw(out, "scale");
    return push(std::move(n));
}

Var Graph::add_scalar(Var a, double offset) {
    Node n;
    n.op = Op::add_scalar;
    n.parents[0] = a.id;
    n.parent_count = 1;
    n.scalar = offset;
    RowMatrix out = value(a).as_matrix().array() + offset;
    n.value = finite_or_throw(out, "add_scalar");
    return push(std::move(n));
}

Var Graph::activation(Activation kind, Var a) {
    const auto A = value(a).as_matrix();
    Node n;
    n.op = Op::activation;
    n.parents[0] = a.id;
    n.parent_count = 1;
    n.kind = kind;
    RowMatrix out(A.rows(), A.cols());
    n.local.resize(A.rows(), A.cols());
    for (Eigen::Index i = 0; i < A.size(); ++i) {
        out.data()[i] = eval_activation(kind, A.data()[i]);
        n.local.data()[i] = activation_derivative(kind, A.data()[i]);
    }
    n.value = finite_or_throw(out, "activation");
    return push(std::move(n));
}

Var Graph::activation_slope(Activation kind, Var a) {
    const auto A = value(a).as_matrix();
    Node n;
    n.op = Op::activation_slope;
    n.parents[0] = a.id;
    n.parent_count = 1;
    n.kind = kind;
    RowMatrix out(A.rows(), A.cols());
    n.local.resize(A.rows(), A.cols());
    for (Eigen::Index i = 0; i < A.size(); ++i) {
        out.data()[i] = activation_derivative(kind, A.data()[i]);
        n.local.data()[i] = activation_second_derivative(kind, A.data()[i]);
    }
    n.value = finite_or_throw(out, "activation_slope");
    return push(std::move(n));
}

Var Graph::repeat_rows(Var a, std::size_t times) {
    if (times == 0) throw ContractError("repeat_rows needs times >= 1");
    const auto A = value(a).as_matrix();
    Node n;
    n.op = Op::repeat_rows;
    n.parents[0] = a.id;
    n.parent_count = 1;
    n.index0 = times;
    const auto k = static_cast<Eigen::Index>(times);
    RowMatrix out(A.rows() * k, A.cols());
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        for (Eigen::Index j = 0; j < k; ++j) out.row(r * k + j) = A.row(r);
    }
    n.value = Tensor::from_matrix(out);
    return push(std::move(n));
}

Var Graph::row_sum(Var a) {
    Node n;
    n.op = Op::row_sum;
    n.parents[0] = a.id;
    n.parent_count = 1;
    RowMatrix out = value(a).as_matrix().rowwise().sum();
    n.value = finite_or_throw(out, "row_sum");
    return push(std::move(n));
}

Var Graph::sum(Var a) {
    Node n;
    n.op = Op::sum;
    n.parents[0] = a.id;
    n.parent_count = 1;
    const double s = value(a).as_matrix().sum();
    n.value = finite_or_throw(RowMatrix::Constant(1, 1, s), "sum");
    return push(std::move(n));
}

Var Graph::reshape(Var a, std::size_t rows, std::size_t cols) {
    const auto& A = value(a);
    if (rows * cols != A.size()) throw ContractError("reshape changes the element count");
    Node n;
    n.op = Op::reshape;
    n.parents[0] = a.id;
    n.parent_count = 1;
    n.value = A.reshaped({rows, cols});
    return push(std::move(n));
}

Var Graph::concat_cols(Var a, Var b) {
    const auto A = value(a).as_matrix();
    const auto B = value(b).as_matrix();
    if (A.rows() != B.rows()) throw ContractError("concat_cols row mismatch");
    Node n;
    n.op = Op::concat_cols;
    n.parents[0] = a.id;
    n.parents[1] = b.id;
    n.parent_count = 2;
    RowMatrix out(A.rows(), A.cols() + B.cols());
    out << A, B;
    n.value = Tensor::from_matrix(out);
    return push(std::move(n));
}

Var Graph::slice_rows(Var a, std::size_t start, std::size_t count) {
    const auto& A = value(a);
    if (start + count > A.rows() || count == 0) throw ContractError("slice_rows out of range");
    Node n;
    n.op = Op::slice_rows;
    n.parents[0] = a.id;
    n.parent_count = 1;
    n.index0 = start;
    n.index1 = count;
    RowMatrix out = A.as_matrix().middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(count));
    n.value = Tensor::from_matrix(out);
    return push(std::move(n));
}

Var Graph::slice_cols(Var a, std::size_t start, std::size_t count) {
    const auto& A = value(a);
    if (start + count > A.cols() || count == 0) throw ContractError("slice_cols out of range");
    Node n;
    n.op = Op::slice_cols;
    n.parents[0] = a.id;
    n.parent_count = 1;
    n.index0 = start;
    n.index1 = count;
    RowMatrix out = A.as_matrix().middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(count));
    n.value = Tensor::from_matrix(out);
    return push(std::move(n));
}

Var Graph::energy_score(Var samples, std::span<const double> observation, double beta) {
    const auto& W = value(samples);
    Node n;
    n.op = Op::energy_score;
    n.parents[0] = samples.id;
    n.parent_count = 1;
    RowMatrix grad;
    const double score = energy_score_with_gradient(W, observation, beta, node(samples).needs_grad ? &grad : nullptr);
    n.local = std::move(grad);
    n.value = finite_or_throw(RowMatrix::Constant(1, 1, score), "energy_score");
    return push(std::move(n));
}

Var Graph::pinball(Var predictions, const Tensor& targets, std::span<const double> levels) {
    const auto P = value(predictions).as_matrix();
    const auto Y = targets.as_matrix();
    if (P.rows() != Y.rows() || P.cols() != Y.cols() || static_cast<std::size_t>(P.cols()) != levels.size()) {
        throw ContractError("pinball expects predictions, targets and levels of matching shape");
    }
    if (P.rows() == 0) throw ContractError("pinball over an empty batch");
    Node n;
    n.op = Op::pinball;
    n.parents[0] = predictions.id;
    n.parent_count = 1;
    n.local.resize(P.rows(), P.cols());
    const double inv_rows = 1.0 / static_cast<double>(P.rows());
    double loss = 0.0;
    for (Eigen::Index r = 0; r < P.rows(); ++r) {
        for (Eigen::Index k = 0; k < P.cols(); ++k) {
            const double alpha = levels[static_cast<std::size_t>(k)];
            const double diff = Y(r, k) - P(r, k);
            if (diff >= 0.0) {
                loss += alpha * diff;
                n.local(r, k) = -alpha * inv_rows;
            } else {
                loss -= (1.0 - alpha) * diff;
                n.local(r, k) = (1.0 - alpha) * inv_rows;
            }
        }
    }
    n.value = finite_or_throw(RowMatrix::Constant(1, 1, loss * inv_rows), "pinball");
    return push(std::move(n));
}

GradientMap Graph::backward(Var output) {
    const auto& out = node(output);
    if (out.value.size() != 1) {
        throw ContractError("backward needs a scalar output, got " + shape_str(out.value));
    }
    if (backward_done_) throw ContractError("backward already ran on this graph; rebuild it for a new pass");
    backward_done_ = true;

    std::vector<RowMatrix> grads(nodes_.size());
    auto accumulate = [&](std::size_t id, const RowMatrix& g) {
        if (!nodes_[id].needs_grad) return;
        if (grads[id].size() == 0) {
            grads[id] = g;
        } else {
            grads[id] += g;
        }
    };
    grads[output.id] = RowMatrix::Ones(1, 1);

    for (std::size_t id = output.id + 1; id-- > 0;) {
        const Node& n = nodes_[id];
        if (!n.needs_grad || grads[id].size() == 0) continue;
        const RowMatrix& g = grads[id];
        const std::size_t p0 = n.parents[0];
        const std::size_t p1 = n.parents[1];
        switch (n.op) {
            case Op::constant:
            case Op::parameter:
                break;
            case Op::matmul: {
                const auto A = nodes_[p0].value.as_matrix();
                const auto B = nodes_[p1].value.as_matrix();
                if (nodes_[p0].needs_grad) accumulate(p0, g * B.transpose());
                if (nodes_[p1].needs_grad) accumulate(p1, A.transpose() * g);
                break;
            }
            case Op::add:
                accumulate(p0, g);
                accumulate(p1, g);
                break;
            case Op::add_row:
                accumulate(p0, g);
                if (nodes_[p1].needs_grad) accumulate(p1, g.colwise().sum());
                break;
            case Op::sub:
                accumulate(p0, g);
                if (nodes_[p1].needs_grad) accumulate(p1, -g);
                break;
            case Op::mul: {
                if (nodes_[p0].needs_grad) accumulate(p0, g.cwiseProduct(nodes_[p1].value.as_matrix()));
                if (nodes_[p1].needs_grad) accumulate(p1, g.cwiseProduct(nodes_[p0].value.as_matrix()));
                break;
            }
            case Op::scale:
                accumulate(p0, g * n.scalar);
                break;
            case Op::add_scalar:
                accumulate(p0, g);
                break;
            case Op::activation:
            case Op::activation_slope:
                accumulate(p0, g.cwiseProduct(n.local));
                break;
            case Op::repeat_rows: {
                const auto k = static_cast<Eigen::Index>(n.index0);
                const auto rows = static_cast<Eigen::Index>(nodes_[p0].value.rows());
                RowMatrix acc = RowMatrix::Zero(rows, g.cols());
                for (Eigen::Index r = 0; r < rows; ++r) {
                    for (Eigen::Index j = 0; j < k; ++j) acc.row(r) += g.row(r * k + j);
                }
                accumulate(p0, acc);
                break;
            }
            case Op::row_sum: {
                const auto cols = static_cast<Eigen::Index>(nodes_[p0].value.cols());
                accumulate(p0, g.col(0).replicate(1, cols));
                break;
            }
            case Op::sum: {
                const auto& P = nodes_[p0].value;
                accumulate(p0, RowMatrix::Constant(static_cast<Eigen::Index>(P.rows()),
                                                   static_cast<Eigen::Index>(P.cols()), g(0, 0)));
                break;
            }
            case Op::reshape: {
                const auto& P = nodes_[p0].value;
                RowMatrix reshaped = Eigen::Map<const RowMatrix>(g.data(), static_cast<Eigen::Index>(P.rows()),
                                                                 static_cast<Eigen::Index>(P.cols()));
                accumulate(p0, reshaped);
                break;
            }
            case Op::concat_cols: {
                const auto left = static_cast<Eigen::Index>(nodes_[p0].value.cols());
                const auto right = static_cast<Eigen::Index>(nodes_[p1].value.cols());
                if (nodes_[p0].needs_grad) accumulate(p0, g.leftCols(left));
                if (nodes_[p1].needs_grad) accumulate(p1, g.rightCols(right));
                break;
            }
            case Op::slice_rows: {
                const auto& P = nodes_[p0].value;
                RowMatrix full = RowMatrix::Zero(static_cast<Eigen::Index>(P.rows()), static_cast<Eigen::Index>(P.cols()));
                full.middleRows(static_cast<Eigen::Index>(n.index0), static_cast<Eigen::Index>(n.index1)) = g;
                accumulate(p0, full);
                break;
            }
            case Op::slice_cols: {
                const auto& P = nodes_[p0].value;
                RowMatrix full = RowMatrix::Zero(static_cast<Eigen::Index>(P.rows()), static_cast<Eigen::Index>(P.cols()));
                full.middleCols(static_cast<Eigen::Index>(n.index0), static_cast<Eigen::Index>(n.index1)) = g;
                accumulate(p0, full);
                break;
            }
            case Op::energy_score:
            case Op::pinball:
                accumulate(p0, n.local * g(0, 0));
                break;
        }
    }

    GradientMap result;
    for (const auto& [name, id] : parameters_) {
        const auto& p = nodes_[id].value;
        if (id > output.id || grads[id].size() == 0) {
            result.emplace(name, Tensor::zeros(p.shape()));
        } else {
            result.emplace(name, Tensor(p.shape(), std::vector<double>(grads[id].data(), grads[id].data() + grads[id].size())));
        }
    }
    return result;
}

}  // namespace coherentcast
