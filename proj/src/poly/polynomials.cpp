#include "gegen/poly/polynomials.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "gegen/num/errors.hpp"

namespace gegen::poly {

std::string_view family_name(Family f) {
  switch (f) {
    case Family::gegenbauer: return "gegenbauer";
    case Family::chebyshev1: return "chebyshev1";
    case Family::chebyshev2: return "chebyshev2";
    case Family::legendre: return "legendre";
    case Family::jacobi: return "jacobi";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::gegenbauer, Family::chebyshev1, Family::chebyshev2, Family::legendre,
                   Family::jacobi}) {
    if (family_name(f) == name) return f;
  }
  throw ParameterError("unknown polynomial family '" + std::string(name) + "'");
}

void PolySpec::validate() const {
  if (order < 1) throw ParameterError("PolySpec: order must be >= 1");
  if (family == Family::gegenbauer && !(alpha > -0.5)) {
    throw DomainError("PolySpec: Gegenbauer alpha must exceed -1/2");
  }
  if (family == Family::jacobi && !(jacobi_a > -1.0 && jacobi_b > -1.0)) {
    throw DomainError("PolySpec: Jacobi parameters must exceed -1");
  }
}

double chebyshev1(std::size_t k, double z) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = z;
  for (std::size_t n = 1; n < k; ++n) {
    const double next = 2.0 * z * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double chebyshev2(std::size_t k, double z) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * z;
  for (std::size_t n = 1; n < k; ++n) {
    const double next = 2.0 * z * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double legendre(std::size_t k, double z) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = z;
  for (std::size_t n = 1; n < k; ++n) {
    const double dn = static_cast<double>(n);
    const double next = ((2.0 * dn + 1.0) * z * cur - dn * prev) / (dn + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double gegenbauer(std::size_t k, double alpha, double z) {
  if (!(alpha > -0.5)) throw DomainError("gegenbauer: alpha must exceed -1/2");
  if (alpha == 0.0) return chebyshev1(k, z);
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * alpha * z;
  for (std::size_t n = 2; n <= k; ++n) {
    const double dn = static_cast<double>(n);
    const double next =
        (2.0 * z * (dn + alpha - 1.0) * cur - (dn + 2.0 * alpha - 2.0) * prev) / dn;
    prev = cur;
    cur = next;
  }
  return cur;
}

double jacobi(std::size_t k, double a, double b, double z) {
  if (!(a > -1.0 && b > -1.0)) throw DomainError("jacobi: parameters must exceed -1");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = (a + 1.0) + (a + b + 2.0) * (z - 1.0) / 2.0;
  for (std::size_t n = 1; n < k; ++n) {
    const double dn = static_cast<double>(n);
    const double s = 2.0 * dn + a + b;
    const double c0 = 2.0 * (dn + 1.0) * (dn + a + b + 1.0) * s;
    const double c1 = (s + 1.0) * ((s + 2.0) * s * z + a * a - b * b);
    const double c2 = 2.0 * (dn + a) * (dn + b) * (s + 2.0);
    const double next = (c1 * cur - c2 * prev) / c0;
    prev = cur;
    cur = next;
  }
  return cur;
}

double evaluate(const PolySpec& spec, std::size_t k, double z) {
  switch (spec.family) {
    case Family::gegenbauer: return gegenbauer(k, spec.alpha, z);
    case Family::chebyshev1: return chebyshev1(k, z);
    case Family::chebyshev2: return chebyshev2(k, z);
    case Family::legendre: return legendre(k, z);
    case Family::jacobi: return jacobi(k, spec.jacobi_a, spec.jacobi_b, z);
  }
  return 0.0;
}

namespace {

struct SignedLog {
  double log_abs;
  int sign;
};

SignedLog log_gamma(double x) {
  int sign = 1;
  if (x < 0.0) {
    const double c = std::ceil(-x);
    sign = static_cast<long long>(c) % 2 == 0 ? 1 : -1;
  }
  return {std::lgamma(x), sign};
}

}  // namespace

double gegenbauer_from_jacobi(std::size_t k, double alpha, double z) {
  if (!(alpha > -0.5)) throw DomainError("gegenbauer_from_jacobi: alpha must exceed -1/2");
  if (alpha == 0.0) {
    throw DomainError("gegenbauer_from_jacobi: alpha = 0 is a pole of Gamma(2 alpha)");
  }
  const double dk = static_cast<double>(k);
  const auto g1 = log_gamma(alpha + 0.5);
  const auto g2 = log_gamma(2.0 * alpha);
  const auto g3 = log_gamma(dk + 2.0 * alpha);
  const auto g4 = log_gamma(dk + alpha + 0.5);
  const double log_ratio = g1.log_abs - g2.log_abs + g3.log_abs - g4.log_abs;
  const int sign = g1.sign * g2.sign * g3.sign * g4.sign;
  const double p = alpha - 0.5;
  return sign * std::exp(log_ratio) * jacobi(k, p, p, z);
}

QuadratureRule gauss_jacobi(std::size_t n, double a, double b) {
  if (n == 0) throw ParameterError("gauss_jacobi: need at least one node");
  if (!(a > -1.0 && b > -1.0)) throw DomainError("gauss_jacobi: parameters must exceed -1");
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::VectorXd diag(nn);
  Eigen::VectorXd sub(nn > 1 ? nn - 1 : 0);
  // Monic Jacobi recurrence coefficients.
  for (Eigen::Index i = 0; i < nn; ++i) {
    const double k = static_cast<double>(i);
    const double s = 2.0 * k + a + b;
    if (i == 0) {
      diag(i) = (b - a) / (a + b + 2.0);
    } else {
      diag(i) = (b * b - a * a) / (s * (s + 2.0));
    }
  }
  for (Eigen::Index i = 1; i < nn; ++i) {
    const double k = static_cast<double>(i);
    const double s = 2.0 * k + a + b;
    double beta;
    if (i == 1) {
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    } else {
      beta = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    }
    sub(i - 1) = std::sqrt(beta);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw OracleError("gauss_jacobi: eigensolver failed");
  const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (Eigen::Index i = 0; i < nn; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
  return rule;
}

QuadratureRule gauss_legendre(std::size_t n) { return gauss_jacobi(n, 0.0, 0.0); }

double orthogonality_residual(const PolySpec& spec, std::size_t m, std::size_t n,
                              std::size_t quadrature_order) {
  spec.validate();
  if (m == n) throw ParameterError("orthogonality_residual: m and n must differ");
  if (quadrature_order < m + n + 4) {
    throw ParameterError("orthogonality_residual: quadrature order must be >= m + n + 4");
  }
  double a = 0.0;
  double b = 0.0;
  switch (spec.family) {
    case Family::gegenbauer:
      // alpha = 0 evaluates T_k, whose weight is (1 - z^2)^(-1/2).
      a = b = spec.alpha - 0.5;
      break;
    case Family::chebyshev1: a = b = -0.5; break;
    case Family::chebyshev2: a = b = 0.5; break;
    case Family::legendre: a = b = 0.0; break;
    case Family::jacobi:
      a = spec.jacobi_a;
      b = spec.jacobi_b;
      break;
  }
  const QuadratureRule rule = gauss_jacobi(quadrature_order, a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double z = rule.nodes[i];
    acc += rule.weights[i] * evaluate(spec, m, z) * evaluate(spec, n, z);
  }
  return std::abs(acc);
}

double generating_function_residual(double alpha, double z, double t, std::size_t terms) {
  if (!(alpha > -0.5)) throw DomainError("generating_function_residual: alpha must exceed -1/2");
  if (std::abs(t) > 0.3) throw DomainError("generating_function_residual: |t| must be <= 0.3");
  if (std::abs(z) > 1.0) throw DomainError("generating_function_residual: |z| must be <= 1");
  if (terms < 10) throw ParameterError("generating_function_residual: need at least 10 terms");
  const double q = 1.0 - 2.0 * z * t + t * t;
  const double closed = alpha == 0.0 ? (1.0 - t * z) / q : std::pow(q, -alpha);
  double series = 0.0;
  double tk = 1.0;
  for (std::size_t k = 0; k <= terms; ++k) {
    series += gegenbauer(k, alpha, z) * tk;
    tk *= t;
  }
  return std::abs(closed - series);
}

}  // namespace gegen::poly
