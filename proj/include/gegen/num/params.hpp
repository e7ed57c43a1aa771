#pragma once

#include <string>
#include <vector>

#include "gegen/num/dense.hpp"
#include "gegen/num/tape.hpp"

namespace gegen::num {

struct Parameter {
  std::string name;
  DenseMatrix value;
  friend bool operator==(const Parameter&, const Parameter&) = default;
};

// Ordered, named collection of trainable matrices.
class ParameterSet {
 public:
  std::size_t add(std::string name, DenseMatrix value);

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  // Index of the parameter called name; throws ParameterError if absent.
  std::size_t index_of(const std::string& name) const;
  std::size_t scalar_count() const;

  // Registers every parameter as a leaf on tape, in order.
  std::vector<Var> bind(Tape& tape) const;

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

 private:
  std::vector<Parameter> params_;
};

}  // namespace gegen::num
