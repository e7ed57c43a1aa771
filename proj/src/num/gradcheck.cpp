#include "gegen/num/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "gegen/num/errors.hpp"

namespace gegen::num {

namespace {

Var build(Tape& tape, const ScalarGraph& f, const std::vector<DenseMatrix>& params,
          std::vector<Var>& leaves) {
  leaves.clear();
  for (const auto& p : params) leaves.push_back(tape.parameter(p));
  Var root = f(tape, leaves);
  const DenseMatrix& v = root.value();
  if (v.rows() != 1 || v.cols() != 1) throw ContractError("gradient check: f must be scalar");
  if (!std::isfinite(v(0, 0))) throw OracleError("gradient check: f is not finite");
  return root;
}

}  // namespace

double evaluate(const ScalarGraph& f, const std::vector<DenseMatrix>& params) {
  Tape tape;
  std::vector<Var> leaves;
  return build(tape, f, params, leaves).value()(0, 0);
}

std::vector<DenseMatrix> gradient(const ScalarGraph& f, const std::vector<DenseMatrix>& params) {
  Tape tape;
  std::vector<Var> leaves;
  Var root = build(tape, f, params, leaves);
  tape.backward(root);
  std::vector<DenseMatrix> grads;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const DenseMatrix& g = tape.grad(leaves[i]);
    grads.push_back(g.same_shape(params[i]) ? g : DenseMatrix(params[i].rows(), params[i].cols()));
  }
  return grads;
}

GradCheckReport finite_diff_check(const ScalarGraph& f, const std::vector<DenseMatrix>& params,
                                  double step) {
  if (!(step > 0.0)) throw ParameterError("finite_diff_check: step must be positive");
  const std::vector<DenseMatrix> analytic = gradient(f, params);
  GradCheckReport report;
  std::vector<DenseMatrix> work = params;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t k = 0; k < params[p].size(); ++k) {
      const double orig = params[p].data()[k];
      work[p].data()[k] = orig + step;
      const double plus = evaluate(f, work);
      work[p].data()[k] = orig - step;
      const double minus = evaluate(f, work);
      work[p].data()[k] = orig;
      const double numeric = (plus - minus) / (2.0 * step);
      const double a = analytic[p].data()[k];
      const double rel = std::abs(a - numeric) / std::max(1.0, std::abs(numeric));
      ++report.coordinates;
      if (rel > report.max_rel_error || report.coordinates == 1) {
        report.max_rel_error = rel;
        report.worst_param = p;
        report.worst_coord = k;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

GradCheckReport finite_diff_check(const ScalarGraph& f, const ParameterSet& params, double step) {
  std::vector<DenseMatrix> values;
  for (const auto& p : params) values.push_back(p.value);
  return finite_diff_check(f, values, step);
}

}  // namespace gegen::num
