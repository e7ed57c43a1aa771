#include "gegen/num/tape.hpp"

#include <cmath>
#include <string>

#include "gegen/num/errors.hpp"

namespace gegen::num {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::constant: return "constant";
    case Op::parameter: return "parameter";
    case Op::matmul: return "matmul";
    case Op::spmm: return "spmm";
    case Op::dense_sparse: return "dense_sparse";
    case Op::add: return "add";
    case Op::sub: return "sub";
    case Op::scale: return "scale";
    case Op::scale_by_entry: return "scale_by_entry";
    case Op::add_row_bias: return "add_row_bias";
    case Op::relu: return "relu";
    case Op::tanh: return "tanh";
    case Op::dropout: return "dropout";
    case Op::sum: return "sum";
    case Op::masked_mse: return "masked_mse";
    case Op::quad_trace: return "quad_trace";
  }
  return "unknown";
}

const DenseMatrix& Var::value() const { return tape->value(*this); }

Var Tape::constant(DenseMatrix value) {
  nodes_.push_back({Op::constant, std::move(value), {}, {}, {}, false});
  return {this, nodes_.size() - 1};
}

Var Tape::parameter(DenseMatrix value) {
  nodes_.push_back({Op::parameter, std::move(value), {}, {}, {}, true});
  return {this, nodes_.size() - 1};
}

const DenseMatrix& Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.id);
  if (n.adjoint.same_shape(n.value)) return n.adjoint;
  return empty_grad_;
}

Var Tape::record(Op op, DenseMatrix value, std::vector<std::size_t> parents, BackwardFn fn) {
  bool needs = false;
  for (std::size_t p : parents) needs = needs || nodes_[p].requires_grad;
  if (!needs) fn = nullptr;
  nodes_.push_back({op, std::move(value), {}, std::move(parents), std::move(fn), needs});
  return {this, nodes_.size() - 1};
}

void Tape::accumulate(std::size_t id, const DenseMatrix& delta) {
  if (nodes_[id].requires_grad) nodes_[id].adjoint += delta;
}

void Tape::accumulate_scaled(std::size_t id, double s, const DenseMatrix& delta) {
  if (nodes_[id].requires_grad) axpy(s, delta, nodes_[id].adjoint);
}

void Tape::backward(Var root) {
  if (root.tape != this) throw ContractError("backward: root belongs to a different tape");
  const DenseMatrix& rv = nodes_.at(root.id).value;
  if (rv.rows() != 1 || rv.cols() != 1) {
    throw ContractError("backward: root must be scalar, got " + std::to_string(rv.rows()) + "x" +
                        std::to_string(rv.cols()));
  }
  for (Node& n : nodes_) {
    if (n.requires_grad) {
      n.adjoint = DenseMatrix(n.value.rows(), n.value.cols());
    } else {
      n.adjoint = DenseMatrix();
    }
  }
  empty_grad_ = DenseMatrix();
  if (!nodes_[root.id].requires_grad) return;
  nodes_[root.id].adjoint(0, 0) = 1.0;
  for (std::size_t id = root.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.backward) n.backward(*this, id);
  }
}

namespace {

Tape& same_tape(Var a, Var b, const char* what) {
  if (a.tape == nullptr || a.tape != b.tape) {
    throw ContractError(std::string(what) + ": operands live on different tapes");
  }
  return *a.tape;
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = same_tape(a, b, "matmul");
  DenseMatrix out = gegen::num::matmul(a.value(), b.value());
  return t.record(Op::matmul, std::move(out), {a.id, b.id},
                  [ia = a.id, ib = b.id](Tape& tp, std::size_t self) {
                    const DenseMatrix& g = tp.adjoint_at(self);
                    if (tp.wants_grad(ia)) tp.accumulate(ia, matmul_nt(g, tp.value_at(ib)));
                    if (tp.wants_grad(ib)) tp.accumulate(ib, matmul_tn(tp.value_at(ia), g));
                  });
}

Var spmm(std::shared_ptr<const SparseMatrix> s, Var x) {
  DenseMatrix out = gegen::num::spmm(*s, x.value());
  return x.tape->record(Op::spmm, std::move(out), {x.id},
                        [s = std::move(s), ix = x.id](Tape& tp, std::size_t self) {
                          tp.accumulate(ix, spmm_transposed(*s, tp.adjoint_at(self)));
                        });
}

Var dense_sparse(Var x, std::shared_ptr<const SparseMatrix> s) {
  DenseMatrix out = gegen::num::dense_sparse(x.value(), *s);
  return x.tape->record(Op::dense_sparse, std::move(out), {x.id},
                        [s = std::move(s), ix = x.id](Tape& tp, std::size_t self) {
                          // d/dX (X S) applied to G is G S^T.
                          const DenseMatrix& g = tp.adjoint_at(self);
                          const auto& off = s->row_offsets();
                          const auto& idx = s->col_indices();
                          const auto& val = s->values();
                          DenseMatrix dx(g.rows(), s->rows());
                          for (std::size_t r = 0; r < g.rows(); ++r) {
                            for (std::size_t k = 0; k < s->rows(); ++k) {
                              double acc = 0.0;
                              for (std::size_t p = off[k]; p < off[k + 1]; ++p)
                                acc += g(r, idx[p]) * val[p];
                              dx(r, k) = acc;
                            }
                          }
                          tp.accumulate(ix, dx);
                        });
}

Var add(Var a, Var b) {
  Tape& t = same_tape(a, b, "add");
  DenseMatrix out = a.value() + b.value();
  return t.record(Op::add, std::move(out), {a.id, b.id},
                  [ia = a.id, ib = b.id](Tape& tp, std::size_t self) {
                    tp.accumulate(ia, tp.adjoint_at(self));
                    tp.accumulate(ib, tp.adjoint_at(self));
                  });
}

Var sub(Var a, Var b) {
  Tape& t = same_tape(a, b, "sub");
  DenseMatrix out = a.value() - b.value();
  return t.record(Op::sub, std::move(out), {a.id, b.id},
                  [ia = a.id, ib = b.id](Tape& tp, std::size_t self) {
                    tp.accumulate(ia, tp.adjoint_at(self));
                    tp.accumulate_scaled(ib, -1.0, tp.adjoint_at(self));
                  });
}

Var scale(Var a, double s) {
  DenseMatrix out = a.value() * s;
  return a.tape->record(Op::scale, std::move(out), {a.id},
                        [ia = a.id, s](Tape& tp, std::size_t self) {
                          tp.accumulate_scaled(ia, s, tp.adjoint_at(self));
                        });
}

Var scale_by_entry(Var vec, std::size_t index, Var x) {
  Tape& t = same_tape(vec, x, "scale_by_entry");
  if (vec.value().rows() != 1 || index >= vec.value().cols()) {
    throw ShapeError("scale_by_entry: index " + std::to_string(index) +
                     " outside coefficient row of width " + std::to_string(vec.value().cols()));
  }
  const double c = vec.value()(0, index);
  DenseMatrix out = x.value() * c;
  return t.record(Op::scale_by_entry, std::move(out), {vec.id, x.id},
                  [iv = vec.id, ix = x.id, index](Tape& tp, std::size_t self) {
                    const DenseMatrix& g = tp.adjoint_at(self);
                    if (tp.wants_grad(iv)) {
                      DenseMatrix dv(1, tp.value_at(iv).cols());
                      dv(0, index) = dot(g, tp.value_at(ix));
                      tp.accumulate(iv, dv);
                    }
                    tp.accumulate_scaled(ix, tp.value_at(iv)(0, index), g);
                  });
}

Var add_row_bias(Var x, Var bias) {
  Tape& t = same_tape(x, bias, "add_row_bias");
  const DenseMatrix& b = bias.value();
  if (b.rows() != 1 || b.cols() != x.value().cols()) throw ShapeError("add_row_bias: bad bias");
  DenseMatrix out = x.value();
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += b(0, j);
  return t.record(Op::add_row_bias, std::move(out), {x.id, bias.id},
                  [ix = x.id, ib = bias.id](Tape& tp, std::size_t self) {
                    const DenseMatrix& g = tp.adjoint_at(self);
                    tp.accumulate(ix, g);
                    if (tp.wants_grad(ib)) {
                      DenseMatrix db(1, g.cols());
                      for (std::size_t i = 0; i < g.rows(); ++i)
                        for (std::size_t j = 0; j < g.cols(); ++j) db(0, j) += g(i, j);
                      tp.accumulate(ib, db);
                    }
                  });
}

Var relu(Var x) {
  DenseMatrix out = x.value();
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return x.tape->record(Op::relu, std::move(out), {x.id},
                        [ix = x.id](Tape& tp, std::size_t self) {
                          DenseMatrix g = tp.adjoint_at(self);
                          auto xv = tp.value_at(ix).data();
                          auto gd = g.data();
                          for (std::size_t i = 0; i < gd.size(); ++i)
                            if (!(xv[i] > 0.0)) gd[i] = 0.0;
                          tp.accumulate(ix, g);
                        });
}

Var tanh(Var x) {
  DenseMatrix out = x.value();
  for (double& v : out.data()) v = std::tanh(v);
  return x.tape->record(Op::tanh, std::move(out), {x.id},
                        [ix = x.id](Tape& tp, std::size_t self) {
                          DenseMatrix g = tp.adjoint_at(self);
                          auto yv = tp.value_at(self).data();
                          auto gd = g.data();
                          for (std::size_t i = 0; i < gd.size(); ++i) gd[i] *= 1.0 - yv[i] * yv[i];
                          tp.accumulate(ix, g);
                        });
}

Var dropout(Var x, double p, Rng& rng, bool training) {
  if (p < 0.0 || p >= 1.0) throw ParameterError("dropout: probability must lie in [0, 1)");
  if (!training || p == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - p);
  DenseMatrix mask(x.value().rows(), x.value().cols());
  for (double& m : mask.data()) m = rng.bernoulli(p) ? 0.0 : keep_scale;
  DenseMatrix out = hadamard(x.value(), mask);
  return x.tape->record(Op::dropout, std::move(out), {x.id},
                        [ix = x.id, mask = std::move(mask)](Tape& tp, std::size_t self) {
                          tp.accumulate(ix, hadamard(tp.adjoint_at(self), mask));
                        });
}

Var sum(Var x) {
  DenseMatrix out(1, 1, gegen::num::sum(x.value()));
  return x.tape->record(Op::sum, std::move(out), {x.id},
                        [ix = x.id](Tape& tp, std::size_t self) {
                          const DenseMatrix& xv = tp.value_at(ix);
                          tp.accumulate(ix, DenseMatrix(xv.rows(), xv.cols(),
                                                        tp.adjoint_at(self)(0, 0)));
                        });
}

Var masked_mse(Var pred, const DenseMatrix& target, std::span<const Entry> entries) {
  const DenseMatrix& p = pred.value();
  if (!p.same_shape(target)) throw ShapeError("masked_mse: prediction and target shapes differ");
  for (const Entry& e : entries) {
    if (e.row >= p.rows() || e.col >= p.cols()) throw ShapeError("masked_mse: entry out of range");
  }
  std::vector<Entry> idx(entries.begin(), entries.end());
  double acc = 0.0;
  for (const Entry& e : idx) {
    const double r = target(e.row, e.col) - p(e.row, e.col);
    acc += r * r;
  }
  const double denom = idx.empty() ? 1.0 : static_cast<double>(idx.size());
  DenseMatrix out(1, 1, acc / denom);
  return pred.tape->record(
      Op::masked_mse, std::move(out), {pred.id},
      [ip = pred.id, idx = std::move(idx), target, denom](Tape& tp, std::size_t self) {
        const double g = tp.adjoint_at(self)(0, 0);
        const DenseMatrix& pv = tp.value_at(ip);
        DenseMatrix dp(pv.rows(), pv.cols());
        for (const Entry& e : idx) {
          dp(e.row, e.col) += 2.0 * g * (pv(e.row, e.col) - target(e.row, e.col)) / denom;
        }
        tp.accumulate(ip, dp);
      });
}

Var quad_trace(std::shared_ptr<const SparseMatrix> q, Var y) {
  const DenseMatrix& yv = y.value();
  if (q->rows() != q->cols() || q->cols() != yv.rows()) {
    throw ShapeError("quad_trace: operator and signal shapes differ");
  }
  DenseMatrix qy = gegen::num::spmm(*q, yv);
  DenseMatrix out(1, 1, dot(yv, qy));
  return y.tape->record(Op::quad_trace, std::move(out), {y.id},
                        [q = std::move(q), iy = y.id](Tape& tp, std::size_t self) {
                          const double g = tp.adjoint_at(self)(0, 0);
                          const DenseMatrix& yv = tp.value_at(iy);
                          // (Q + Q^T) Y
                          DenseMatrix d = gegen::num::spmm(*q, yv);
                          d += spmm_transposed(*q, yv);
                          tp.accumulate_scaled(iy, g, d);
                        });
}

}  // namespace gegen::num
