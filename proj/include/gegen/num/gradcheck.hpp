#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gegen/num/dense.hpp"
#include "gegen/num/params.hpp"
#include "gegen/num/tape.hpp"

namespace gegen::num {

// Builds a scalar (1x1) node from leaves bound to the given parameters.
using ScalarGraph = std::function<Var(Tape&, std::span<const Var>)>;

struct GradCheckReport {
  // max over coordinates of |autodiff - central| / max(1, |central|)
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_coord = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates = 0;
};

// Reverse-mode gradient of f at params.
std::vector<DenseMatrix> gradient(const ScalarGraph& f, const std::vector<DenseMatrix>& params);
double evaluate(const ScalarGraph& f, const std::vector<DenseMatrix>& params);

// Compares reverse-mode gradients against central differences with the given
// step. Throws OracleError if f is non-finite at any evaluated point.
GradCheckReport finite_diff_check(const ScalarGraph& f, const std::vector<DenseMatrix>& params,
                                  double step);
GradCheckReport finite_diff_check(const ScalarGraph& f, const ParameterSet& params, double step);

}  // namespace gegen::num
