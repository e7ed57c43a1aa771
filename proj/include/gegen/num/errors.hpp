#pragma once

#include <stdexcept>
#include <string>

namespace gegen {

// Error hierarchy shared by every module. Callers that only care about
// "something in the library rejected this" can catch gegen::Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (non-scalar backward root, empty
// training set, basis too shallow, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

class OptimizerError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  using Error::Error;
};

class IngestError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gegen
