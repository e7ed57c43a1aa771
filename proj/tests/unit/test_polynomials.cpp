#include <doctest.h>

#include <cmath>
#include <vector>

#include "gegen/graphs/graph.hpp"
#include "gegen/num/errors.hpp"
#include "gegen/num/tape.hpp"
#include "gegen/poly/basis.hpp"
#include "gegen/poly/polynomials.hpp"
#include "support.hpp"

using namespace gegen;
using namespace gegen::poly;
using num::DenseMatrix;
using num::Rng;
using num::SparseMatrix;

namespace {

// Explicit-sum Gegenbauer: sum_j (-1)^j Gamma(k-j+a) / (Gamma(a) j! (k-2j)!) (2z)^(k-2j).
double gegenbauer_sum(std::size_t k, double a, double z) {
  double s = 0.0;
  for (std::size_t j = 0; 2 * j <= k; ++j) {
    const double c = std::tgamma(static_cast<double>(k - j) + a) /
                     (std::tgamma(a) * std::tgamma(static_cast<double>(j) + 1) *
                      std::tgamma(static_cast<double>(k - 2 * j) + 1));
    s += (j % 2 ? -1.0 : 1.0) * c * std::pow(2.0 * z, static_cast<double>(k - 2 * j));
  }
  return s;
}

double binom(double n, double k) { return std::tgamma(n + 1) / (std::tgamma(k + 1) * std::tgamma(n - k + 1)); }

// Explicit-sum Jacobi: sum_s C(n+a, n-s) C(n+b, s) ((z-1)/2)^s ((z+1)/2)^(n-s).
double jacobi_sum(std::size_t n, double a, double b, double z) {
  const double nd = static_cast<double>(n);
  double s = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double sd = static_cast<double>(i);
    s += binom(nd + a, nd - sd) * binom(nd + b, sd) * std::pow((z - 1) / 2, sd) * std::pow((z + 1) / 2, nd - sd);
  }
  return s;
}

std::vector<double> grid(std::size_t points) {
  std::vector<double> z(points);
  for (std::size_t i = 0; i < points; ++i) z[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(points - 1);
  return z;
}

}  // namespace

TEST_CASE("closed-form low-degree values") {
  CHECK(std::abs(gegenbauer(2, 1.0, 0.5)) < 1e-15);
  for (double a : {0.3, 0.7, 2.0}) {
    for (double z : {-0.8, 0.1, 0.9}) {
      CHECK(gegenbauer(0, a, z) == 1.0);
      CHECK(gegenbauer(1, a, z) == doctest::Approx(2 * a * z));
      CHECK(gegenbauer(2, a, z) == doctest::Approx(2 * a * (1 + a) * z * z - a));
    }
  }
  CHECK(chebyshev1(2, 0.6) == doctest::Approx(-0.28));
  CHECK(chebyshev2(3, 0.5) == doctest::Approx(-1.0));
  CHECK(legendre(2, 1.0) == doctest::Approx(1.0));
  CHECK(legendre(2, 0.3) == doctest::Approx((3 * 0.09 - 1) / 2));
  for (std::size_t k = 0; k <= 12; ++k) CHECK(gegenbauer(k, 0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("chebyshev families match their trigonometric forms") {
  for (double z : grid(97)) {
    const double t = std::acos(z);
    for (std::size_t k = 0; k <= 10; ++k) {
      CHECK(std::abs(chebyshev1(k, z) - std::cos(static_cast<double>(k) * t)) < 1e-12);
      if (std::abs(std::sin(t)) > 1e-3) {
        CHECK(std::abs(chebyshev2(k, z) - std::sin(static_cast<double>(k + 1) * t) / std::sin(t)) < 1e-10);
      }
    }
  }
}

TEST_CASE("gegenbauer recurrence matches the explicit sum") {
  for (double a : {-0.4, 0.3, 1.0, 1.17, 2.5}) {
    for (double z : grid(41)) {
      for (std::size_t k = 0; k <= 10; ++k) {
        CHECK(std::abs(gegenbauer(k, a, z) - gegenbauer_sum(k, a, z)) < 1e-9 * (1 + std::abs(gegenbauer_sum(k, a, z))));
      }
    }
  }
}

TEST_CASE("jacobi recurrence matches the explicit sum") {
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0.0, 0.0}, {0.5, -0.3}, {-0.7, 1.2}, {2.0, 0.4}}) {
    for (double z : grid(31)) {
      for (std::size_t k = 0; k <= 10; ++k) {
        const double want = jacobi_sum(k, a, b, z);
        CHECK(std::abs(jacobi(k, a, b, z) - want) < 1e-10 * (1 + std::abs(want)));
      }
    }
  }
  CHECK_THROWS_AS(jacobi(2, -1.0, 0.0, 0.1), DomainError);
}

TEST_CASE("family identities on a 200-point grid") {
  for (double z : grid(200)) {
    for (std::size_t k = 0; k <= 10; ++k) {
      CHECK(std::abs(gegenbauer(k, 1.0, z) - chebyshev2(k, z)) < 1e-10);
      CHECK(std::abs(gegenbauer(k, 0.5, z) - legendre(k, z)) < 1e-10);
      CHECK(std::abs(gegenbauer(k, 0.0, z) - chebyshev1(k, z)) < 1e-10);
      CHECK(std::abs(jacobi(k, 0.0, 0.0, z) - legendre(k, z)) < 1e-10);
      if (k >= 1) {
        const double a = 1e-6;
        const double limit = 0.5 * ((static_cast<double>(k) + a) / a) * gegenbauer(k, a, z);
        CHECK(std::abs(limit - chebyshev1(k, z)) < 1e-4);
      }
    }
  }
}

TEST_CASE("gegenbauer via jacobi agrees with the recurrence") {
  for (double a : {0.3, 0.5, 1.0, 1.17, 1.5}) {
    for (double z : grid(50)) {
      CHECK(gegenbauer_from_jacobi(0, a, z) == doctest::Approx(1.0).epsilon(1e-13));
      for (std::size_t k = 0; k <= 10; ++k) {
        CHECK(std::abs(gegenbauer_from_jacobi(k, a, z) - gegenbauer(k, a, z)) < 1e-10);
      }
    }
  }
  CHECK(gegenbauer_from_jacobi(2, 1.0, 0.3) == doctest::Approx(-0.64).epsilon(1e-12));
  CHECK(std::abs(gegenbauer_from_jacobi(5, 1.17, -0.4) - gegenbauer(5, 1.17, -0.4)) < 1e-10);
  CHECK_THROWS_AS(gegenbauer_from_jacobi(3, 0.0, 0.2), DomainError);
  CHECK_THROWS_AS(gegenbauer(3, -0.5, 0.2), DomainError);
}

TEST_CASE("quadrature integrates polynomials exactly") {
  const auto gl = gauss_legendre(8);
  for (int j = 0; j <= 7; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 2 * j);
    CHECK(s == doctest::Approx(2.0 / (2 * j + 1)).epsilon(1e-13));
  }
  // Moments of (1 - z)^a (1 + z)^b: the zeroth is 2^(a+b+1) B(a+1, b+1).
  for (auto [a, b] : std::vector<std::pair<double, double>>{{-0.5, -0.5}, {0.3, 1.1}, {-0.8, 0.0}}) {
    const auto q = gauss_jacobi(10, a, b);
    double s0 = 0.0;
    for (double w : q.weights) s0 += w;
    const double m0 = std::pow(2.0, a + b + 1) * std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 2);
    CHECK(s0 == doctest::Approx(m0).epsilon(1e-12));
    // (1 + z) absorbs into b: integral of (1 + z) w equals the zeroth moment with b + 1.
    double s1 = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s1 += q.weights[i] * (1 + q.nodes[i]);
    const double m1 = std::pow(2.0, a + b + 2) * std::tgamma(a + 1) * std::tgamma(b + 2) / std::tgamma(a + b + 3);
    CHECK(s1 == doctest::Approx(m1).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gauss_jacobi(0, 0.0, 0.0), ParameterError);
}

TEST_CASE("orthogonality residuals") {
  PolySpec g{Family::gegenbauer, 3, 1.0};
  CHECK(orthogonality_residual(g, 1, 2, 10) < 1e-10);
  PolySpec p{Family::legendre, 3};
  CHECK(orthogonality_residual(p, 0, 2, 10) < 1e-12);
  PolySpec t{Family::chebyshev1, 6};
  CHECK(orthogonality_residual(t, 3, 5, 12) < 1e-8);
  PolySpec u{Family::chebyshev2, 6};
  CHECK(orthogonality_residual(u, 2, 4, 12) < 1e-8);
  PolySpec j{Family::jacobi, 6, 1.0, 0.4, -0.6};
  CHECK(orthogonality_residual(j, 1, 4, 12) < 1e-8);
  for (double a : {-0.4, 0.0, 0.3, 1.17, 1.5}) {
    PolySpec s{Family::gegenbauer, 11, a};
    for (std::size_t m = 0; m <= 10; ++m) {
      for (std::size_t n = m + 1; n <= 10; ++n) CHECK(orthogonality_residual(s, m, n, m + n + 4) < 1e-8);
    }
  }
  CHECK_THROWS_AS(orthogonality_residual(g, 2, 2, 10), ParameterError);
  CHECK_THROWS_AS(orthogonality_residual(g, 1, 2, 6), ParameterError);
}

TEST_CASE("generating function") {
  CHECK(generating_function_residual(0.8, 0.4, 0.0, 10) == 0.0);
  CHECK(generating_function_residual(1.0, 0.5, 0.2, 20) < 1e-12);
  // alpha = 1/2 reproduces the Legendre generating function.
  for (double z : {-0.9, 0.0, 0.35}) {
    const double t = 0.25;
    double series = 0.0;
    for (std::size_t k = 0; k <= 25; ++k) series += legendre(k, z) * std::pow(t, static_cast<double>(k));
    CHECK(std::abs(series - 1.0 / std::sqrt(1 - 2 * z * t + t * t)) < 1e-12);
    CHECK(generating_function_residual(0.5, z, t, 25) < 1e-12);
  }
  for (double a : {0.0, 0.3, 1.5}) CHECK(generating_function_residual(a, -0.7, -0.3, 25) < 1e-10);
  CHECK_THROWS_AS(generating_function_residual(1.0, 0.5, 0.31, 20), DomainError);
  CHECK_THROWS_AS(generating_function_residual(1.0, 0.5, 0.2, 9), ParameterError);
}

TEST_CASE("polyspec validation and family names") {
  CHECK_THROWS_AS((PolySpec{Family::gegenbauer, 3, -0.5}.validate()), DomainError);
  CHECK_THROWS_AS((PolySpec{Family::gegenbauer, 0, 1.0}.validate()), ParameterError);
  CHECK_THROWS_AS((PolySpec{Family::jacobi, 3, 1.0, -1.0, 0.0}.validate()), DomainError);
  for (Family f : {Family::gegenbauer, Family::chebyshev1, Family::chebyshev2, Family::legendre, Family::jacobi}) {
    CHECK(parse_family(family_name(f)) == f);
  }
  CHECK_THROWS_AS(parse_family("hermite"), ParameterError);
}

TEST_CASE("basis on a diagonal operator reduces to scalar evaluation") {
  const std::vector<double> z{-1.0, -0.3, 0.2, 0.75, 1.0};
  const auto lhat = SparseMatrix::diagonal(z);
  Rng rng(11);
  const DenseMatrix x = testing::random_dense(5, 3, rng);
  for (double a : {0.0, 0.5, 1.17}) {
    const auto stack = gegenbauer_basis(lhat, x, 7, a);
    REQUIRE(stack.size() == 7);
    CHECK(stack[0] == x);
    for (std::size_t k = 0; k < 7; ++k) {
      for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
          CHECK(std::abs(stack[k](i, c) - gegenbauer(k, a, z[i]) * x(i, c)) < 1e-12);
        }
      }
    }
  }
  CHECK(gegenbauer_basis(lhat, x, 1, 1.0).size() == 1);
  CHECK_THROWS_AS(gegenbauer_basis(lhat, DenseMatrix(4, 3), 3, 1.0), ShapeError);
  CHECK_THROWS_AS(gegenbauer_basis(lhat, x, 3, -0.5), DomainError);
  CHECK_THROWS_AS(gegenbauer_basis(lhat, x, 0, 1.0), ParameterError);
}

TEST_CASE("alpha zero basis equals the matrix chebyshev recurrence") {
  Rng rng(12);
  const auto bundle = graphs::laplacian_bundle(testing::random_graph(14, rng));
  const DenseMatrix l = bundle.scaled->to_dense();
  const DenseMatrix x = testing::random_dense(14, 2, rng);
  const auto stack = gegenbauer_basis(*bundle.scaled, x, 6, 0.0);
  std::vector<DenseMatrix> t{x, num::matmul(l, x)};
  for (std::size_t k = 2; k < 6; ++k) {
    DenseMatrix next = num::matmul(l, t[k - 1]);
    next *= 2.0;
    next -= t[k - 2];
    t.push_back(next);
  }
  for (std::size_t k = 0; k < 6; ++k) CHECK(num::max_abs_diff(stack[k], t[k]) < 1e-12);
}

TEST_CASE("spectral reference") {
  Rng rng(13);
  const DenseMatrix x = testing::random_dense(15, 2, rng);
  const auto bundle = graphs::laplacian_bundle(testing::random_graph(15, rng));
  const DenseMatrix lhat = bundle.scaled->to_dense();
  const std::vector<double> one{1.0, 0.0, 0.0};
  CHECK(num::max_abs_diff(spectral_filter_reference(lhat, one, 1.3, x), x) < 1e-12);

  const DenseMatrix path_hat{{0, -1}, {-1, 0}};
  const DenseMatrix px{{1.0}, {3.0}};
  const std::vector<double> lin{0.0, 1.0};
  DenseMatrix want = num::matmul(path_hat, px);
  want *= 2.0;
  CHECK(num::max_abs_diff(spectral_filter_reference(path_hat, lin, 1.0, px), want) < 1e-12);

  const std::vector<double> theta{0.4, -1.1, 0.7, 0.25};
  const auto stack = gegenbauer_basis(*bundle.scaled, x, 4, 1.17);
  DenseMatrix recursive(15, 2);
  for (std::size_t k = 0; k < 4; ++k) num::axpy(theta[k], stack[k], recursive);
  CHECK(num::max_abs_diff(spectral_filter_reference(lhat, theta, 1.17, x), recursive) < 1e-8);
  CHECK_THROWS_AS(spectral_filter_reference(lhat, std::vector<double>{}, 1.0, x), ParameterError);
}

TEST_CASE("tape basis matches the dense basis and uses zeta - 1 sparse products") {
  Rng rng(14);
  const auto bundle = graphs::laplacian_bundle(testing::random_graph(10, rng));
  const DenseMatrix x = testing::random_dense(10, 3, rng);
  for (std::size_t zeta : {1u, 2u, 5u}) {
    num::Tape tape;
    const auto xv = tape.parameter(x);
    const auto vars = gegenbauer_basis(bundle.scaled, xv, zeta, 0.8);
    const auto dense = gegenbauer_basis(*bundle.scaled, x, zeta, 0.8);
    REQUIRE(vars.size() == zeta);
    for (std::size_t k = 0; k < zeta; ++k) CHECK(num::max_abs_diff(vars[k].value(), dense[k]) < 1e-14);
    std::size_t products = 0;
    for (std::size_t id = 0; id < tape.size(); ++id) {
      if (tape.op(num::Var{&tape, id}) == num::Op::spmm) ++products;
    }
    CHECK(products == zeta - 1);
  }
}
