#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace gegen::poly {

enum class Family { gegenbauer, chebyshev1, chebyshev2, legendre, jacobi };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

struct PolySpec {
  Family family = Family::gegenbauer;
  std::size_t order = 1;  // zeta: number of basis terms
  double alpha = 1.0;     // gegenbauer, > -1/2
  double jacobi_a = 0.0;  // jacobi (lambda, beta), both > -1
  double jacobi_b = 0.0;

  // Throws DomainError / ParameterError on invalid parameters.
  void validate() const;
};

// C_k^(alpha)(z) by three-term recurrence. alpha == 0 evaluates the
// Chebyshev-I recurrence instead (the renormalised alpha -> 0 limit); the
// raw recurrence is identically zero for k >= 1 there.
double gegenbauer(std::size_t k, double alpha, double z);

double chebyshev1(std::size_t k, double z);
double chebyshev2(std::size_t k, double z);
double legendre(std::size_t k, double z);
// Jacobi P_k^(a,b)(z), a, b > -1.
double jacobi(std::size_t k, double a, double b, double z);

double evaluate(const PolySpec& spec, std::size_t k, double z);

// Gegenbauer value obtained from the Jacobi polynomial with a = b = alpha - 1/2
// and the gamma-function normalisation (computed in log space). alpha == 0 is
// rejected: Gamma(2 alpha) has a pole there.
double gegenbauer_from_jacobi(std::size_t k, double alpha, double z);

// Gauss quadrature for the weight (1 - z)^a (1 + z)^b on [-1, 1], n nodes,
// built with the Golub-Welsch eigenvalue method. Exact for polynomials of
// degree <= 2n - 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_jacobi(std::size_t n, double a, double b);
QuadratureRule gauss_legendre(std::size_t n);

// |integral_{-1}^{1} p_m(z) p_n(z) w(z) dz| with the family's own weight.
double orthogonality_residual(const PolySpec& spec, std::size_t m, std::size_t n,
                              std::size_t quadrature_order);

// |(1 - 2zt + t^2)^(-alpha) - sum_{k<=K} C_k^(alpha)(z) t^k|. For alpha == 0
// the Chebyshev-I generating function (1 - tz) / (1 - 2zt + t^2) is used so the
// residual matches the dispatch in gegenbauer().
double generating_function_residual(double alpha, double z, double t, std::size_t terms);

}  // namespace gegen::poly
