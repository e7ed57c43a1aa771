#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "gegen/graphs/graph.hpp"
#include "gegen/graphs/learn.hpp"
#include "gegen/num/errors.hpp"
#include "support.hpp"

using namespace gegen;
using namespace gegen::graphs;
using num::Rng;
using num::Triplet;
using testing::random_dense;

TEST_CASE("make_graph validates adjacency") {
  CHECK_THROWS_AS(make_graph(SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}})), DomainError);
  CHECK_THROWS_AS(make_graph(SparseMatrix::from_triplets(2, 2, {{0, 1, -1.0}, {1, 0, -1.0}})), DomainError);
  CHECK_THROWS_AS(make_graph(SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}})), DomainError);
  CHECK_THROWS_AS(make_graph(SparseMatrix::from_triplets(2, 3, {})), ShapeError);

  testing::WarningCapture warnings;
  auto g = make_graph(SparseMatrix::from_triplets(4, 4, {{0, 1, 1.0}, {1, 0, 1.0}, {2, 3, 1.0}, {3, 2, 1.0}}));
  CHECK_FALSE(is_connected(g));
  CHECK(warnings.messages.size() == 1);
  CHECK(g.edge_count() == 2);
}

TEST_CASE("knn gaussian graph is symmetric with every node keeping k neighbours") {
  Rng rng(1);
  const DenseMatrix coords = random_dense(25, 2, rng, 0.0, 1.0);
  const auto g = knn_gaussian_graph(coords, 4);
  const auto& a = *g.adjacency;
  CHECK(a.is_symmetric());
  for (std::size_t i = 0; i < 25; ++i) {
    const std::size_t degree = a.row_offsets()[i + 1] - a.row_offsets()[i];
    CHECK(degree >= 4);
    for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      CHECK(a.values()[p] > 0.0);
      CHECK(a.values()[p] <= 1.0);
    }
  }
  CHECK_THROWS_AS(knn_gaussian_graph(coords, 25), ParameterError);
  CHECK_THROWS_AS(knn_gaussian_graph(DenseMatrix(1, 2), 1), ParameterError);
}

TEST_CASE("knn weights follow the gaussian kernel") {
  const DenseMatrix coords{{0.0}, {1.0}, {3.0}};
  const auto g = knn_gaussian_graph(coords, 1, 2.0);
  CHECK(g.adjacency->at(0, 1) == doctest::Approx(std::exp(-1.0 / 8.0)));
  CHECK(g.adjacency->at(1, 2) == doctest::Approx(std::exp(-4.0 / 8.0)));
  CHECK(g.adjacency->at(0, 2) == 0.0);
}

TEST_CASE("laplacian bundle spectral properties") {
  Rng rng(2);
  testing::WarningCapture warnings;
  std::size_t fallbacks = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testing::random_graph(5 + rng.below(26), rng);
    const auto b = laplacian_bundle(g);
    const DenseMatrix l = b.laplacian->to_dense();
    for (std::size_t i = 0; i < l.rows(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < l.cols(); ++j) row += l(i, j);
      CHECK(std::abs(row) <= 1e-10);
    }
    for (int k = 0; k < 100; ++k) {
      const DenseMatrix x = random_dense(l.rows(), 1, rng);
      CHECK(num::dot(x, num::matmul(l, x)) >= -1e-10);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(testing::to_eigen(l));
    const double true_max = es.eigenvalues().maxCoeff();
    CHECK(b.lambda_max >= true_max);
    if (b.lambda_fallback) {
      ++fallbacks;
      CHECK(b.lambda_max == doctest::Approx(2.0 * *std::max_element(b.degrees.begin(), b.degrees.end())));
    } else {
      CHECK(b.lambda_max <= true_max * (1 + 2e-6));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> scaled(testing::to_eigen(b.scaled->to_dense()));
    CHECK(scaled.eigenvalues().minCoeff() >= -1.0 - 1e-6);
    CHECK(scaled.eigenvalues().maxCoeff() <= 1.0 + 1e-6);
  }
  CHECK(fallbacks < 10);
  CHECK(warnings.messages.size() >= fallbacks);
}

TEST_CASE("two-node path has the closed-form bundle") {
  const auto b = laplacian_bundle(testing::path_graph(2));
  CHECK(b.laplacian->to_dense() == DenseMatrix{{1, -1}, {-1, 1}});
  CHECK(b.lambda_max == doctest::Approx(2.0).epsilon(2e-6));
  CHECK(num::max_abs_diff(b.scaled->to_dense(), DenseMatrix{{0, -1}, {-1, 0}}) < 1e-5);
}

TEST_CASE("power iteration agrees with a dense eigensolver on a 20-node graph") {
  Rng rng(3);
  const auto g = testing::random_graph(20, rng);
  const auto l = combinatorial_laplacian(*g.adjacency);
  const auto r = largest_eigenvalue(l);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(testing::to_eigen(l.to_dense()));
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-6));
}

TEST_CASE("gcn propagation on an edgeless graph is the identity") {
  testing::WarningCapture quiet;
  const auto g = make_graph(SparseMatrix::from_triplets(3, 3, {}));
  const auto b = laplacian_bundle(g);
  CHECK(b.gcn_propagation->to_dense() == DenseMatrix::identity(3));
  CHECK(b.scaled->to_dense() == DenseMatrix::identity(3) * -1.0);
}

TEST_CASE("smoothness and temporal differences") {
  const auto path = testing::path_graph(2);
  const auto l = combinatorial_laplacian(*path.adjacency);
  CHECK(smoothness_s2(DenseMatrix{{1.0}, {0.0}}, l) == 1.0);
  CHECK(smoothness_s2(DenseMatrix(2, 3, 4.0), l) == 0.0);
  CHECK_THROWS_AS(smoothness_s2(DenseMatrix(3, 1), l), ShapeError);

  const auto dh = temporal_diff_matrix(4).to_dense();
  CHECK(dh == DenseMatrix{{-1, 0, 0}, {1, -1, 0}, {0, 1, -1}, {0, 0, 1}});
  const DenseMatrix x{{1, 3, 6, 10}};
  CHECK(num::matmul(x, dh) == DenseMatrix{{2, 3, 4}});
  CHECK_THROWS_AS(temporal_diff_matrix(1), ParameterError);
}

TEST_CASE("edge list round trip") {
  Rng rng(4);
  const auto g = testing::random_graph(12, rng);
  testing::TempDir dir("edges");
  write_edge_list(dir.path() / "g.csv", g);
  const auto back = read_edge_list(dir.path() / "g.csv", 12);
  CHECK(back.nodes == 12);
  CHECK(num::max_abs_diff(back.adjacency->to_dense(), g.adjacency->to_dense()) == 0.0);
}

TEST_CASE("graph learning decreases the objective and keeps weights valid") {
  Rng rng(5);
  const DenseMatrix samples = random_dense(200, 8, rng);
  GraphLearnConfig cfg;
  cfg.gamma = 0.05;
  cfg.beta = 1.0;
  const auto learned = learn_graph(samples, cfg);
  for (std::size_t i = 1; i < learned.objective_trace.size(); ++i) {
    CHECK(learned.objective_trace[i] <= learned.objective_trace[i - 1] + 1e-12);
  }
  CHECK(learned.graph.adjacency->is_symmetric());
  for (double w : learned.graph.adjacency->values()) CHECK(w >= 0.0);
  CHECK_THROWS_AS(learn_graph(samples, GraphLearnConfig{0.0, 0.0}), ParameterError);
}

TEST_CASE("graph learning recovers the generating laplacian from its exact covariance") {
  // With gamma = 0 and S = (L0 + beta I)^{-1} the unconstrained optimum of the
  // objective is L0 itself.
  const auto path = testing::path_graph(5);
  const DenseMatrix l0 = combinatorial_laplacian(*path.adjacency).to_dense();
  const double beta = 0.5;
  Eigen::MatrixXd k = testing::to_eigen(l0) + beta * Eigen::MatrixXd::Identity(5, 5);
  const DenseMatrix cov = testing::from_eigen(k.inverse());
  GraphLearnConfig cfg;
  cfg.gamma = 0.0;
  cfg.beta = beta;
  cfg.max_iterations = 20000;
  cfg.tolerance = 1e-15;
  const auto learned = learn_graph_from_covariance(cov, cfg);
  const DenseMatrix l = combinatorial_laplacian(*learned.graph.adjacency).to_dense();
  CHECK(num::max_abs_diff(l, l0) < 1e-4);
  CHECK(graph_learning_objective(learned.graph.adjacency->to_dense(), cov, cfg) <=
        graph_learning_objective(path.adjacency->to_dense(), cov, cfg) + 1e-9);
}
