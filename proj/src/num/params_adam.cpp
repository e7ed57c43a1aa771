#include <cmath>
#include <string>

#include "gegen/num/adam.hpp"
#include "gegen/num/errors.hpp"
#include "gegen/num/params.hpp"

namespace gegen::num {

std::size_t ParameterSet::add(std::string name, DenseMatrix value) {
  for (const auto& p : params_) {
    if (p.name == name) throw ParameterError("duplicate parameter name '" + name + "'");
  }
  params_.push_back({std::move(name), std::move(value)});
  return params_.size() - 1;
}

std::size_t ParameterSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i].name == name) return i;
  throw ParameterError("unknown parameter '" + name + "'");
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

std::vector<Var> ParameterSet::bind(Tape& tape) const {
  std::vector<Var> vars;
  vars.reserve(params_.size());
  for (const auto& p : params_) vars.push_back(tape.parameter(p.value));
  return vars;
}

Adam::Adam(const ParameterSet& params, AdamConfig config) : config_(config) {
  if (!(config_.learning_rate > 0.0)) throw ParameterError("Adam: learning rate must be > 0");
  if (config_.beta1 < 0.0 || config_.beta1 >= 1.0 || config_.beta2 < 0.0 ||
      config_.beta2 >= 1.0) {
    throw ParameterError("Adam: betas must lie in [0, 1)");
  }
  for (const auto& p : params) {
    m_.emplace_back(p.value.rows(), p.value.cols());
    v_.emplace_back(p.value.rows(), p.value.cols());
  }
}

void Adam::step(ParameterSet& params, const std::vector<DenseMatrix>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw ShapeError("Adam::step: parameter/gradient count mismatch");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!grads[i].same_shape(params[i].value)) {
      throw ShapeError("Adam::step: gradient shape mismatch for '" + params[i].name + "'");
    }
    if (!grads[i].all_finite()) {
      throw OptimizerError("Adam::step: non-finite gradient in parameter '" + params[i].name +
                           "'");
    }
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double bc1 = 1.0 - std::pow(config_.beta1, t);
  const double bc2 = 1.0 - std::pow(config_.beta2, t);
  const double decay = 1.0 - config_.learning_rate * config_.weight_decay;
  for (std::size_t i = 0; i < grads.size(); ++i) {
    auto p = params[i].value.data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    auto g = grads[i].data();
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] *= decay;
      m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * g[k];
      v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * g[k] * g[k];
      const double m_hat = m[k] / bc1;
      const double v_hat = v[k] / bc2;
      p[k] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

}  // namespace gegen::num
