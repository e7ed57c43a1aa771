#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "gegen/num/dense.hpp"
#include "gegen/num/rng.hpp"
#include "gegen/num/sparse.hpp"

namespace gegen::num {

enum class Op {
  constant,
  parameter,
  matmul,
  spmm,
  dense_sparse,
  add,
  sub,
  scale,
  scale_by_entry,
  add_row_bias,
  relu,
  tanh,
  dropout,
  sum,
  masked_mse,
  quad_trace,
};

std::string_view op_name(Op op);

class Tape;

// Handle to a node recorded on a Tape. Cheap to copy; only valid while the
// owning tape is alive.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = std::numeric_limits<std::size_t>::max();

  const DenseMatrix& value() const;
  bool valid() const { return tape != nullptr; }
};

// Reverse-mode differentiation tape. Nodes are appended in evaluation order,
// so the node list is already a topological order of the computation DAG.
//
// Sparse operands are held by shared_ptr and never copied; dense constants
// are copied onto the tape.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(DenseMatrix value);
  Var parameter(DenseMatrix value);

  const DenseMatrix& value(Var v) const { return nodes_.at(v.id).value; }
  // Adjoint of v after backward(); all-zero if v does not influence the root.
  const DenseMatrix& grad(Var v) const;
  Op op(Var v) const { return nodes_.at(v.id).op; }
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
  const std::vector<std::size_t>& parents(Var v) const { return nodes_.at(v.id).parents; }
  std::size_t size() const { return nodes_.size(); }

  // Zeroes every adjoint, seeds root with 1 and propagates. Root must be 1x1.
  void backward(Var root);

  // Used by operation implementations.
  Var record(Op op, DenseMatrix value, std::vector<std::size_t> parents, BackwardFn fn);
  const DenseMatrix& value_at(std::size_t id) const { return nodes_[id].value; }
  const DenseMatrix& adjoint_at(std::size_t id) const { return nodes_[id].adjoint; }
  bool wants_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  // Adds delta into node id's adjoint if that node requires a gradient.
  void accumulate(std::size_t id, const DenseMatrix& delta);
  void accumulate_scaled(std::size_t id, double s, const DenseMatrix& delta);

 private:
  struct Node {
    Op op;
    DenseMatrix value;
    DenseMatrix adjoint;
    std::vector<std::size_t> parents;
    BackwardFn backward;
    bool requires_grad = false;
  };

  std::vector<Node> nodes_;
  DenseMatrix empty_grad_;
};

// ---- operations --------------------------------------------------------

Var matmul(Var a, Var b);
Var spmm(std::shared_ptr<const SparseMatrix> s, Var x);
Var dense_sparse(Var x, std::shared_ptr<const SparseMatrix> s);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double s);
// vec(0, index) * x, where vec is a 1xK row of coefficients.
Var scale_by_entry(Var vec, std::size_t index, Var x);
// x + 1 * bias, bias is 1 x x.cols().
Var add_row_bias(Var x, Var bias);
Var relu(Var x);
Var tanh(Var x);
// Inverted dropout: Bernoulli(1-p) mask scaled by 1/(1-p) when training,
// identity otherwise.
Var dropout(Var x, double p, Rng& rng, bool training);
Var sum(Var x);
// (1/|entries|) sum (target - pred)^2 over entries; 0 when entries is empty.
Var masked_mse(Var pred, const DenseMatrix& target, std::span<const Entry> entries);
// tr(y^T q y).
Var quad_trace(std::shared_ptr<const SparseMatrix> q, Var y);

}  // namespace gegen::num
