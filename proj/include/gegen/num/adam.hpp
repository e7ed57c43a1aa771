#pragma once

#include <cstdint>
#include <vector>

#include "gegen/num/dense.hpp"
#include "gegen/num/params.hpp"

namespace gegen::num {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Decoupled: params <- params * (1 - learning_rate * weight_decay) before
  // the moment update is applied.
  double weight_decay = 0.0;
};

class Adam {
 public:
  Adam(const ParameterSet& params, AdamConfig config);

  // Throws OptimizerError naming the first parameter with a non-finite
  // gradient; parameters are left untouched in that case.
  void step(ParameterSet& params, const std::vector<DenseMatrix>& grads);

  std::uint64_t steps() const { return step_; }
  const AdamConfig& config() const { return config_; }
  const std::vector<DenseMatrix>& first_moments() const { return m_; }
  const std::vector<DenseMatrix>& second_moments() const { return v_; }

 private:
  AdamConfig config_;
  std::vector<DenseMatrix> m_;
  std::vector<DenseMatrix> v_;
  std::uint64_t step_ = 0;
};

}  // namespace gegen::num
