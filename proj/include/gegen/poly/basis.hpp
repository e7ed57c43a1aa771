#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "gegen/num/dense.hpp"
#include "gegen/num/sparse.hpp"
#include "gegen/num/tape.hpp"

namespace gegen::poly {

// [B_0, ..., B_{zeta-1}] with B_k = C_k^(alpha)(Lhat) X.
using BasisStack = std::vector<num::DenseMatrix>;

// Coefficients of the matrix recurrence
//   B_k = first * Lhat B_{k-1} - second * B_{k-2},  k >= 2,
// with B_1 = b1_scale * Lhat X. alpha == 0 uses the Chebyshev-I recurrence.
struct RecurrenceStep {
  double first;
  double second;
};
RecurrenceStep gegenbauer_step(std::size_t k, double alpha);
double gegenbauer_first_scale(double alpha);

// zeta - 1 sparse products in total.
BasisStack gegenbauer_basis(const num::SparseMatrix& lhat, const num::DenseMatrix& x,
                            std::size_t zeta, double alpha);

// Same recurrence recorded on the tape so gradients flow through x.
std::vector<num::Var> gegenbauer_basis(const std::shared_ptr<const num::SparseMatrix>& lhat,
                                       num::Var x, std::size_t zeta, double alpha);

// Dense ground truth: eigendecompose Lhat and apply
// g(lambda) = sum_k theta_k C_k^(alpha)(lambda) spectrally to each column of x.
// Intended for N <= 200.
num::DenseMatrix spectral_filter_reference(const num::DenseMatrix& lhat,
                                           std::span<const double> theta, double alpha,
                                           const num::DenseMatrix& x);

}  // namespace gegen::poly
