#include "gegen/poly/basis.hpp"

#include <Eigen/Eigenvalues>
#include <string>

#include "gegen/num/errors.hpp"
#include "gegen/poly/polynomials.hpp"

namespace gegen::poly {

namespace {

void check_inputs(std::size_t lhat_rows, std::size_t lhat_cols, std::size_t x_rows,
                  std::size_t zeta, double alpha) {
  if (lhat_rows != lhat_cols) throw ShapeError("gegenbauer_basis: Lhat must be square");
  if (x_rows != lhat_rows) {
    throw ShapeError("gegenbauer_basis: X has " + std::to_string(x_rows) + " rows, Lhat has " +
                     std::to_string(lhat_rows));
  }
  if (zeta < 1) throw ParameterError("gegenbauer_basis: zeta must be >= 1");
  if (!(alpha > -0.5)) throw DomainError("gegenbauer_basis: alpha must exceed -1/2");
}

}  // namespace

RecurrenceStep gegenbauer_step(std::size_t k, double alpha) {
  if (alpha == 0.0) return {2.0, 1.0};
  const double dk = static_cast<double>(k);
  return {2.0 * (dk + alpha - 1.0) / dk, (dk + 2.0 * alpha - 2.0) / dk};
}

double gegenbauer_first_scale(double alpha) { return alpha == 0.0 ? 1.0 : 2.0 * alpha; }

BasisStack gegenbauer_basis(const num::SparseMatrix& lhat, const num::DenseMatrix& x,
                            std::size_t zeta, double alpha) {
  check_inputs(lhat.rows(), lhat.cols(), x.rows(), zeta, alpha);
  BasisStack out;
  out.reserve(zeta);
  out.push_back(x);
  if (zeta == 1) return out;
  out.push_back(num::spmm(lhat, x) * gegenbauer_first_scale(alpha));
  for (std::size_t k = 2; k < zeta; ++k) {
    const auto step = gegenbauer_step(k, alpha);
    num::DenseMatrix next = num::spmm(lhat, out[k - 1]);
    next *= step.first;
    num::axpy(-step.second, out[k - 2], next);
    out.push_back(std::move(next));
  }
  return out;
}

std::vector<num::Var> gegenbauer_basis(const std::shared_ptr<const num::SparseMatrix>& lhat,
                                       num::Var x, std::size_t zeta, double alpha) {
  check_inputs(lhat->rows(), lhat->cols(), x.value().rows(), zeta, alpha);
  std::vector<num::Var> out;
  out.reserve(zeta);
  out.push_back(x);
  if (zeta == 1) return out;
  out.push_back(num::scale(num::spmm(lhat, x), gegenbauer_first_scale(alpha)));
  for (std::size_t k = 2; k < zeta; ++k) {
    const auto step = gegenbauer_step(k, alpha);
    num::Var lb = num::scale(num::spmm(lhat, out[k - 1]), step.first);
    out.push_back(num::sub(lb, num::scale(out[k - 2], step.second)));
  }
  return out;
}

num::DenseMatrix spectral_filter_reference(const num::DenseMatrix& lhat,
                                           std::span<const double> theta, double alpha,
                                           const num::DenseMatrix& x) {
  const std::size_t n = lhat.rows();
  if (lhat.cols() != n || x.rows() != n) throw ShapeError("spectral_filter_reference: shapes differ");
  if (theta.empty()) throw ParameterError("spectral_filter_reference: theta is empty");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = lhat(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw OracleError("spectral_filter_reference: eigensolver failed");
  const Eigen::MatrixXd& u = solver.eigenvectors();
  Eigen::VectorXd g(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
      acc += theta[k] * gegenbauer(k, alpha, solver.eigenvalues()(i));
    }
    g(i) = acc;
  }
  Eigen::MatrixXd xe(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(x.cols()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < x.cols(); ++j)
      xe(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x(i, j);
  const Eigen::MatrixXd y = u * g.asDiagonal() * (u.transpose() * xe);
  num::DenseMatrix out(n, x.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < x.cols(); ++j)
      out(i, j) = y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

}  // namespace gegen::poly
