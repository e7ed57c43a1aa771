#pragma once

#include <optional>
#include <span>

#include "gegen/num/dense.hpp"

namespace gegen::harness {

struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
  // Mean of |xhat - x| / |xhat|; absent when some estimate is exactly zero.
  std::optional<double> mape;
};

// Evaluates only the listed entries. Throws ContractError when eval is empty.
Metrics compute_metrics(const num::DenseMatrix& xhat, const num::DenseMatrix& x,
                        std::span<const num::Entry> eval, bool with_mape = true);

}  // namespace gegen::harness
