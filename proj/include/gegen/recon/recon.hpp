#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "gegen/graphs/graph.hpp"
#include "gegen/model/gegen_gnn.hpp"
#include "gegen/num/adam.hpp"
#include "gegen/num/errors.hpp"
#include "gegen/num/sparse.hpp"
#include "gegen/num/tape.hpp"

namespace gegen::recon {

using num::DenseMatrix;
using num::Entry;
using num::SparseMatrix;
using num::Var;

// Entries (i, j) with mask(i, j) != 0, in row-major order.
std::vector<Entry> mask_entries(const DenseMatrix& mask);

// J o Y restricted to the given entries, zero elsewhere.
DenseMatrix zero_fill(const DenseMatrix& y, std::span<const Entry> keep);

// Model input (J o Y) D_h, N x (M - 1).
DenseMatrix model_input(const DenseMatrix& y, std::span<const Entry> observed);

struct LossConfig {
  double lambda = 1.5e-4;
  double epsilon = 0.04;

  void validate() const;
  friend bool operator==(const LossConfig&, const LossConfig&) = default;
};

// Precomputed pieces of the smoothness term: L + eps I and D_h.
struct SobolevOperator {
  std::shared_ptr<const SparseMatrix> shifted_laplacian;
  std::shared_ptr<const SparseMatrix> temporal_diff;
};
SobolevOperator make_sobolev_operator(const SparseMatrix& laplacian, double epsilon, std::size_t steps);

// tr((Xhat D_h)^T (L + eps I) (Xhat D_h)).
Var sobolev_term(Var xhat, const SobolevOperator& op);

// (1/|T|) sum_T (X - Xhat)^2 + lambda * sobolev_term(Xhat). Throws
// ContractError when train is empty.
Var recon_loss(Var xhat, const DenseMatrix& x, std::span<const Entry> train, double lambda,
               const SobolevOperator& op);

struct TrainConfig {
  std::size_t epochs = 2000;
  num::AdamConfig adam{};
  LossConfig loss{};
  std::uint64_t seed = 0;
};

struct TrainPoint {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_rmse = 0.0;  // NaN when there is no validation split
};

struct TrainResult {
  model::GegenGnn model;
  std::vector<TrainPoint> trace;
  // Epoch whose parameters were returned; equals epochs when nothing ran.
  std::size_t best_epoch = 0;
  double best_val_rmse = 0.0;
};

class TrainingDiverged : public OptimizerError {
 public:
  TrainingDiverged(std::size_t epoch, const std::string& what);
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

// Fits model to y on train entries. The model sees only train entries in its
// input. With a validation split the parameters with the lowest validation
// RMSE (evaluated after each update) are returned, otherwise the final ones.
TrainResult train(model::GegenGnn model, const graphs::LaplacianBundle& bundle, const DenseMatrix& y,
                  std::span<const Entry> train_entries, std::span<const Entry> val_entries,
                  const TrainConfig& cfg);

void write_trace_csv(const std::filesystem::path& path, std::span<const TrainPoint> trace);

double rmse_on(const DenseMatrix& xhat, const DenseMatrix& x, std::span<const Entry> entries);

enum class ConvexVariant { tgsr, graphtrss };
std::string_view convex_variant_name(ConvexVariant v);
ConvexVariant parse_convex_variant(std::string_view name);

struct ConvexSpec {
  ConvexVariant variant = ConvexVariant::graphtrss;
  double lambda = 1.0;
  double epsilon = 0.05;  // ignored by tgsr
  double tolerance = 1e-8;  // on the Frobenius norm of the unpreconditioned residual
  std::size_t max_iterations = 10000;
  bool precondition = true;

  void validate() const;
  double shift() const { return variant == ConvexVariant::graphtrss ? epsilon : 0.0; }
};

struct ConvexResult {
  DenseMatrix x;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
  // Entry 0 is the starting iterate; one entry per CG iteration afterwards.
  std::vector<double> residual_history;
  std::vector<double> objective_history;
};

// A(X) = J o X + lambda (L + eps I) X D_h D_h^T.
DenseMatrix apply_normal_operator(const DenseMatrix& x, const DenseMatrix& mask,
                                  const SparseMatrix& laplacian, const ConvexSpec& spec);

// 1/2 ||J o Xhat - J o Y||_F^2 + lambda/2 tr((Xhat D_h)^T (L + eps I) (Xhat D_h)).
double objective_value(const DenseMatrix& xhat, const DenseMatrix& y, const DenseMatrix& mask,
                       const SparseMatrix& laplacian, const ConvexSpec& spec);
DenseMatrix objective_gradient(const DenseMatrix& xhat, const DenseMatrix& y, const DenseMatrix& mask,
                               const SparseMatrix& laplacian, const ConvexSpec& spec);

// Preconditioned conjugate gradient on A(X) = J o Y, started from J o Y.
// When max_iterations is reached the best iterate is returned with
// converged = false and a warning.
ConvexResult convex_reconstruct(const DenseMatrix& y, const DenseMatrix& mask,
                                const graphs::LaplacianBundle& bundle, const ConvexSpec& spec);

// Sampled entries keep Y; others take the mean of their node's samples, or the
// global sample mean for nodes with none.
DenseMatrix mean_impute(const DenseMatrix& y, const DenseMatrix& mask);

}  // namespace gegen::recon
