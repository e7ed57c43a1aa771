#include "gegen/harness/metrics.hpp"

#include <cmath>

#include "gegen/log.hpp"
#include "gegen/num/errors.hpp"

namespace gegen::harness {

Metrics compute_metrics(const num::DenseMatrix& xhat, const num::DenseMatrix& x,
                        std::span<const num::Entry> eval, bool with_mape) {
  if (eval.empty()) throw ContractError("compute_metrics: evaluation set is empty");
  if (!xhat.same_shape(x)) throw ShapeError("compute_metrics: Xhat and X differ in shape");
  double sq = 0.0;
  double abs = 0.0;
  double rel = 0.0;
  bool zero_estimate = false;
  for (const auto& e : eval) {
    if (e.row >= x.rows() || e.col >= x.cols()) throw ShapeError("compute_metrics: entry out of range");
    const double est = xhat(e.row, e.col);
    const double err = std::abs(est - x(e.row, e.col));
    sq += err * err;
    abs += err;
    if (est == 0.0) zero_estimate = true;
    else rel += err / std::abs(est);
  }
  const double n = static_cast<double>(eval.size());
  Metrics m{std::sqrt(sq / n), abs / n, std::nullopt};
  if (with_mape) {
    if (zero_estimate) warn("MAPE undefined: an estimate is exactly zero");
    else m.mape = rel / n;
  }
  return m;
}

}  // namespace gegen::harness
