#include "gegen/recon/recon.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "gegen/io/csv.hpp"
#include "gegen/log.hpp"

namespace gegen::recon {

std::vector<Entry> mask_entries(const DenseMatrix& mask) {
  std::vector<Entry> out;
  for (std::size_t i = 0; i < mask.rows(); ++i)
    for (std::size_t j = 0; j < mask.cols(); ++j)
      if (mask(i, j) != 0.0) out.push_back({i, j});
  return out;
}

DenseMatrix zero_fill(const DenseMatrix& y, std::span<const Entry> keep) {
  DenseMatrix out(y.rows(), y.cols());
  for (const auto& e : keep) {
    if (e.row >= y.rows() || e.col >= y.cols()) throw ShapeError("zero_fill: entry out of range");
    out(e.row, e.col) = y(e.row, e.col);
  }
  return out;
}

DenseMatrix model_input(const DenseMatrix& y, std::span<const Entry> observed) {
  return num::dense_sparse(zero_fill(y, observed), graphs::temporal_diff_matrix(y.cols()));
}

void LossConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("loss: lambda must be >= 0");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ParameterError("loss: epsilon must be >= 0");
}

SobolevOperator make_sobolev_operator(const SparseMatrix& laplacian, double epsilon, std::size_t steps) {
  if (laplacian.rows() != laplacian.cols()) throw ShapeError("sobolev operator: Laplacian must be square");
  if (!(epsilon >= 0.0)) throw ParameterError("sobolev operator: epsilon must be >= 0");
  SobolevOperator op;
  op.shifted_laplacian = std::make_shared<const SparseMatrix>(
      laplacian.linear_combination(1.0, SparseMatrix::identity(laplacian.rows()), epsilon));
  op.temporal_diff = std::make_shared<const SparseMatrix>(graphs::temporal_diff_matrix(steps));
  return op;
}

Var sobolev_term(Var xhat, const SobolevOperator& op) {
  return num::quad_trace(op.shifted_laplacian, num::dense_sparse(xhat, op.temporal_diff));
}

Var recon_loss(Var xhat, const DenseMatrix& x, std::span<const Entry> train, double lambda,
               const SobolevOperator& op) {
  if (train.empty()) throw ContractError("recon_loss: training index set is empty");
  if (!xhat.value().same_shape(x)) throw ShapeError("recon_loss: Xhat and X differ in shape");
  Var mse = num::masked_mse(xhat, x, train);
  if (lambda == 0.0) return mse;
  return num::add(mse, num::scale(sobolev_term(xhat, op), lambda));
}

TrainingDiverged::TrainingDiverged(std::size_t epoch, const std::string& what)
    : OptimizerError("training diverged at epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}

double rmse_on(const DenseMatrix& xhat, const DenseMatrix& x, std::span<const Entry> entries) {
  if (entries.empty()) return std::numeric_limits<double>::quiet_NaN();
  double acc = 0.0;
  for (const auto& e : entries) {
    const double d = xhat(e.row, e.col) - x(e.row, e.col);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(entries.size()));
}

TrainResult train(model::GegenGnn model, const graphs::LaplacianBundle& bundle, const DenseMatrix& y,
                  std::span<const Entry> train_entries, std::span<const Entry> val_entries,
                  const TrainConfig& cfg) {
  cfg.loss.validate();
  if (train_entries.empty()) throw ContractError("train: no training entries");
  if (y.rows() != bundle.nodes()) throw ShapeError("train: signal rows differ from graph nodes");
  if (model.output_width() != y.cols() || model.input_width() + 1 != y.cols()) {
    throw ShapeError("train: model widths do not match a signal with " + std::to_string(y.cols()) +
                     " time steps");
  }
  const DenseMatrix input = model_input(y, train_entries);
  const SobolevOperator op = make_sobolev_operator(*bundle.laplacian, cfg.loss.epsilon, y.cols());
  num::Adam adam(model.params(), cfg.adam);
  const num::Rng root(cfg.seed);

  TrainResult result{model, {}, 0, std::numeric_limits<double>::quiet_NaN()};
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<DenseMatrix> grads;
    double loss_value = 0.0;
    {
      num::Tape tape;
      const auto vars = model.params().bind(tape);
      num::Rng drop = root.split(epoch);
      Var xhat = model.forward(tape, vars, bundle, tape.constant(input), model::Mode::train, drop);
      Var loss = recon_loss(xhat, y, train_entries, cfg.loss.lambda, op);
      loss_value = loss.value()(0, 0);
      if (!std::isfinite(loss_value)) throw TrainingDiverged(epoch, "loss is not finite");
      tape.backward(loss);
      grads.reserve(vars.size());
      for (const auto& v : vars) grads.push_back(tape.grad(v));
    }
    try {
      adam.step(model.params(), grads);
    } catch (const OptimizerError& e) {
      throw TrainingDiverged(epoch, e.what());
    }
    double val = std::numeric_limits<double>::quiet_NaN();
    if (!val_entries.empty()) {
      val = rmse_on(model.predict(bundle, input), y, val_entries);
      if (!std::isfinite(val)) throw TrainingDiverged(epoch, "validation prediction is not finite");
      if (val < best) {
        best = val;
        result.model.params() = model.params();
        result.best_epoch = epoch + 1;
        result.best_val_rmse = val;
      }
    }
    result.trace.push_back({epoch + 1, loss_value, val});
  }
  if (val_entries.empty() || cfg.epochs == 0) {
    result.model.params() = model.params();
    result.best_epoch = cfg.epochs;
  }
  return result;
}

void write_trace_csv(const std::filesystem::path& path, std::span<const TrainPoint> trace) {
  auto out = io::open_output(path);
  out << "epoch,train_loss,val_rmse\n";
  for (const auto& p : trace) {
    out << p.epoch << ',' << io::format_double(p.train_loss) << ',' << io::format_double(p.val_rmse) << '\n';
  }
}

std::string_view convex_variant_name(ConvexVariant v) {
  return v == ConvexVariant::tgsr ? "tgsr" : "graphtrss";
}

ConvexVariant parse_convex_variant(std::string_view name) {
  if (name == "tgsr") return ConvexVariant::tgsr;
  if (name == "graphtrss") return ConvexVariant::graphtrss;
  throw ParameterError("unknown convex variant '" + std::string(name) + "'");
}

void ConvexSpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("convex: lambda must be >= 0");
  if (variant == ConvexVariant::graphtrss && !(epsilon > 0.0)) {
    throw ParameterError("convex: graphtrss requires epsilon > 0");
  }
  if (!(tolerance > 0.0)) throw ParameterError("convex: tolerance must be > 0");
  if (max_iterations < 1) throw ParameterError("convex: max_iterations must be >= 1");
}

namespace {

void check_convex_shapes(const DenseMatrix& x, const DenseMatrix& mask, const SparseMatrix& laplacian) {
  if (!x.same_shape(mask)) throw ShapeError("convex: signal and mask differ in shape");
  if (laplacian.rows() != x.rows() || laplacian.cols() != x.rows()) {
    throw ShapeError("convex: Laplacian does not match signal rows");
  }
  if (x.cols() < 2) throw ShapeError("convex: need at least two time steps");
}

// Holds L + eps I, D_h and D_h^T so repeated operator applications stay sparse.
struct NormalOperator {
  const DenseMatrix& mask;
  SparseMatrix shifted;
  SparseMatrix dh;
  SparseMatrix dht;
  double lambda;

  NormalOperator(const DenseMatrix& m, const SparseMatrix& laplacian, const ConvexSpec& spec)
      : mask(m),
        shifted(laplacian.linear_combination(1.0, SparseMatrix::identity(laplacian.rows()), spec.shift())),
        dh(graphs::temporal_diff_matrix(m.cols())),
        dht(dh.transposed()),
        lambda(spec.lambda) {}

  DenseMatrix apply(const DenseMatrix& x) const {
    DenseMatrix out = num::hadamard(mask, x);
    if (lambda != 0.0) {
      const DenseMatrix smooth = num::dense_sparse(num::spmm(shifted, num::dense_sparse(x, dh)), dht);
      num::axpy(lambda, smooth, out);
    }
    return out;
  }

  double smoothness(const DenseMatrix& x) const {
    const DenseMatrix d = num::dense_sparse(x, dh);
    return num::dot(d, num::spmm(shifted, d));
  }

  DenseMatrix diagonal() const {
    DenseMatrix diag(mask.rows(), mask.cols());
    const std::size_t m = mask.cols();
    for (std::size_t i = 0; i < mask.rows(); ++i) {
      const double lii = shifted.at(i, i);
      for (std::size_t j = 0; j < m; ++j) {
        // (D_h D_h^T)_jj is 1 at the ends and 2 inside.
        const double ddt = (j == 0 || j + 1 == m) ? 1.0 : 2.0;
        diag(i, j) = mask(i, j) + lambda * lii * ddt;
      }
    }
    return diag;
  }
};

}  // namespace

DenseMatrix apply_normal_operator(const DenseMatrix& x, const DenseMatrix& mask,
                                  const SparseMatrix& laplacian, const ConvexSpec& spec) {
  check_convex_shapes(x, mask, laplacian);
  return NormalOperator(mask, laplacian, spec).apply(x);
}

double objective_value(const DenseMatrix& xhat, const DenseMatrix& y, const DenseMatrix& mask,
                       const SparseMatrix& laplacian, const ConvexSpec& spec) {
  check_convex_shapes(xhat, mask, laplacian);
  if (!xhat.same_shape(y)) throw ShapeError("objective_value: Xhat and Y differ in shape");
  const NormalOperator op(mask, laplacian, spec);
  const DenseMatrix r = num::hadamard(mask, xhat - y);
  const double fit = 0.5 * num::dot(r, r);
  return spec.lambda == 0.0 ? fit : fit + 0.5 * spec.lambda * op.smoothness(xhat);
}

DenseMatrix objective_gradient(const DenseMatrix& xhat, const DenseMatrix& y, const DenseMatrix& mask,
                               const SparseMatrix& laplacian, const ConvexSpec& spec) {
  check_convex_shapes(xhat, mask, laplacian);
  if (!xhat.same_shape(y)) throw ShapeError("objective_gradient: Xhat and Y differ in shape");
  return NormalOperator(mask, laplacian, spec).apply(xhat) - num::hadamard(mask, y);
}

ConvexResult convex_reconstruct(const DenseMatrix& y, const DenseMatrix& mask,
                                const graphs::LaplacianBundle& bundle, const ConvexSpec& spec) {
  spec.validate();
  const SparseMatrix& laplacian = *bundle.laplacian;
  check_convex_shapes(y, mask, laplacian);
  const NormalOperator op(mask, laplacian, spec);
  const DenseMatrix b = num::hadamard(mask, y);
  const double offset = 0.5 * num::dot(b, b);
  DenseMatrix inv_diag = op.diagonal();
  for (double& d : inv_diag.data()) d = (spec.precondition && d > 0.0) ? 1.0 / d : 1.0;

  ConvexResult res;
  res.x = b;
  DenseMatrix r = b - op.apply(res.x);
  DenseMatrix z = num::hadamard(inv_diag, r);
  DenseMatrix p = z;
  double rz = num::dot(r, z);
  // For the quadratic 1/2 x^T A x - b^T x plus ||b||^2 / 2, the value equals
  // objective_value; with residual r = b - A x it is -(b + r) . x / 2 + offset.
  auto objective = [&](const DenseMatrix& x, const DenseMatrix& resid) {
    return -0.5 * (num::dot(b, x) + num::dot(resid, x)) + offset;
  };
  res.residual = num::frobenius_norm(r);
  res.residual_history.push_back(res.residual);
  res.objective_history.push_back(objective(res.x, r));
  DenseMatrix best = res.x;
  double best_residual = res.residual;

  while (res.residual >= spec.tolerance && res.iterations < spec.max_iterations) {
    const DenseMatrix ap = op.apply(p);
    const double pap = num::dot(p, ap);
    if (!(pap > 0.0)) break;  // breakdown: operator singular along p
    const double step = rz / pap;
    num::axpy(step, p, res.x);
    num::axpy(-step, ap, r);
    ++res.iterations;
    res.residual = num::frobenius_norm(r);
    res.residual_history.push_back(res.residual);
    res.objective_history.push_back(objective(res.x, r));
    if (res.residual < best_residual) {
      best_residual = res.residual;
      best = res.x;
    }
    z = num::hadamard(inv_diag, r);
    const double rz_next = num::dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    p *= beta;
    p += z;
  }
  res.converged = res.residual < spec.tolerance;
  if (!res.converged) {
    warn("conjugate gradient stopped after " + std::to_string(res.iterations) +
         " iterations with residual " + io::format_double(res.residual));
    res.x = std::move(best);
    res.residual = best_residual;
  }
  return res;
}

DenseMatrix mean_impute(const DenseMatrix& y, const DenseMatrix& mask) {
  if (!y.same_shape(mask)) throw ShapeError("mean_impute: signal and mask differ in shape");
  DenseMatrix out(y.rows(), y.cols());
  double global = 0.0;
  std::size_t global_count = 0;
  std::vector<double> node_mean(y.rows(), 0.0);
  std::vector<std::size_t> node_count(y.rows(), 0);
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j)
      if (mask(i, j) != 0.0) {
        node_mean[i] += y(i, j);
        ++node_count[i];
        global += y(i, j);
        ++global_count;
      }
  if (global_count == 0) throw ContractError("mean_impute: mask has no sampled entries");
  global /= static_cast<double>(global_count);
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const double fill = node_count[i] ? node_mean[i] / static_cast<double>(node_count[i]) : global;
    for (std::size_t j = 0; j < y.cols(); ++j) out(i, j) = mask(i, j) != 0.0 ? y(i, j) : fill;
  }
  return out;
}

}  // namespace gegen::recon
