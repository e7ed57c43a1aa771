#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gegen/graphs/graph.hpp"
#include "gegen/num/errors.hpp"
#include "gegen/num/gradcheck.hpp"
#include "gegen/recon/recon.hpp"
#include "support.hpp"

using namespace gegen;
using namespace gegen::recon;
using num::DenseMatrix;
using num::Rng;
using num::Tape;
using num::Var;

namespace {

DenseMatrix random_mask(std::size_t n, std::size_t m, double p, Rng& rng) {
  DenseMatrix mask(n, m);
  for (double& v : mask.data()) v = rng.bernoulli(p) ? 1.0 : 0.0;
  mask(0, 0) = 1.0;
  return mask;
}

// diag(vec J) + lambda (D_h D_h^T kron (L + eps I)) with column-major vec.
Eigen::MatrixXd dense_normal_matrix(const DenseMatrix& mask, const DenseMatrix& l, double lambda, double eps) {
  const auto n = static_cast<Eigen::Index>(mask.rows());
  const auto m = static_cast<Eigen::Index>(mask.cols());
  Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(m, m - 1);
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    dh(j, j) = -1.0;
    dh(j + 1, j) = 1.0;
  }
  const Eigen::MatrixXd k = dh * dh.transpose();
  const Eigen::MatrixXd ls = testing::to_eigen(l) + eps * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n * m, n * m);
  for (Eigen::Index p = 0; p < m; ++p)
    for (Eigen::Index q = 0; q < m; ++q) a.block(p * n, q * n, n, n) = lambda * k(p, q) * ls;
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) a(j * n + i, j * n + i) += mask(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return a;
}

DenseMatrix dense_solve(const DenseMatrix& y, const DenseMatrix& mask, const DenseMatrix& l, double lambda, double eps) {
  const Eigen::MatrixXd a = dense_normal_matrix(mask, l, lambda, eps);
  const auto n = static_cast<Eigen::Index>(y.rows());
  Eigen::VectorXd b(a.rows());
  for (std::size_t j = 0; j < y.cols(); ++j)
    for (std::size_t i = 0; i < y.rows(); ++i) b(static_cast<Eigen::Index>(j) * n + static_cast<Eigen::Index>(i)) = mask(i, j) * y(i, j);
  const Eigen::VectorXd x = a.ldlt().solve(b);
  DenseMatrix out(y.rows(), y.cols());
  for (std::size_t j = 0; j < y.cols(); ++j)
    for (std::size_t i = 0; i < y.rows(); ++i) out(i, j) = x(static_cast<Eigen::Index>(j) * n + static_cast<Eigen::Index>(i));
  return out;
}

double condition_number(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const double hi = es.eigenvalues().maxCoeff();
  const double lo = es.eigenvalues().minCoeff();
  // TGSR is singular when a node or a time step has no samples.
  return lo <= 1e-12 * hi ? std::numeric_limits<double>::infinity() : hi / lo;
}

model::ModelConfig small_config() {
  model::ModelConfig c;
  c.conv_hidden = 4;
  c.linear_layers = 0;
  c.zeta = 2;
  c.dropout = 0.0;
  c.activation = model::Activation::identity;
  return c;
}

}  // namespace

TEST_CASE("mask helpers and model input") {
  const DenseMatrix mask{{1, 0, 1}, {0, 1, 0}};
  const auto e = mask_entries(mask);
  REQUIRE(e.size() == 3);
  CHECK(e[0].row == 0);
  CHECK(e[0].col == 0);
  CHECK(e[2].row == 1);
  CHECK(e[2].col == 1);
  const DenseMatrix y{{1, 2, 4}, {5, 6, 7}};
  CHECK(zero_fill(y, e) == DenseMatrix{{1, 0, 4}, {0, 6, 0}});
  CHECK(model_input(y, e) == DenseMatrix{{-1, 4}, {6, -6}});
}

TEST_CASE("loss examples") {
  const auto path = testing::path_graph(2);
  const auto l = graphs::combinatorial_laplacian(*path.adjacency);
  Tape tape;
  const DenseMatrix x{{1.0, 2.0}, {3.0, 5.0}};
  const auto all = mask_entries(DenseMatrix(2, 2, 1.0));
  const auto op = make_sobolev_operator(l, 0.04, 2);
  CHECK(recon_loss(tape.constant(x), x, all, 0.0, op).value()(0, 0) == 0.0);
  CHECK(sobolev_term(tape.constant(DenseMatrix{{3, 3}, {-1, -1}}), op).value()(0, 0) == 0.0);
  const auto op0 = make_sobolev_operator(l, 0.0, 2);
  CHECK(sobolev_term(tape.constant(DenseMatrix{{0, 1}, {0, 0}}), op0).value()(0, 0) == doctest::Approx(1.0));
  // Masked MSE over two entries plus lambda times the Sobolev term.
  const std::vector<num::Entry> two{{0, 0}, {1, 1}};
  const DenseMatrix xhat{{0, 1}, {0, 0}};
  const double want = (1.0 + 25.0) / 2.0 + 0.5 * 1.0;
  CHECK(recon_loss(tape.constant(xhat), x, two, 0.5, op0).value()(0, 0) == doctest::Approx(want));
  CHECK_THROWS_AS(recon_loss(tape.constant(x), x, std::span<const num::Entry>{}, 0.1, op), ContractError);
  CHECK_THROWS_AS((LossConfig{-1.0, 0.0}.validate()), ParameterError);
}

TEST_CASE("loss gradient matches finite differences") {
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const auto g = testing::random_graph(5, rng);
    const auto l = graphs::combinatorial_laplacian(*g.adjacency);
    const DenseMatrix x = testing::random_dense(5, 6, rng);
    const auto entries = mask_entries(random_mask(5, 6, 0.5, rng));
    const auto op = make_sobolev_operator(l, rng.uniform(0.01, 0.1), 6);
    const double lambda = rng.uniform(0.1, 1.0);
    num::ScalarGraph f = [&](Tape&, std::span<const Var> v) { return recon_loss(v[0], x, entries, lambda, op); };
    CHECK(num::finite_diff_check(f, std::vector<DenseMatrix>{testing::random_dense(5, 6, rng)}, 1e-5).max_rel_error <
          1e-4);
  }
}

TEST_CASE("training decreases MSE on a linear target") {
  Rng rng(2);
  const auto bundle = graphs::laplacian_bundle(testing::random_graph(6, rng));
  // Linear in time so the target is reachable from (J o Y) D_h.
  DenseMatrix y(6, 8);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 8; ++j) y(i, j) = 0.2 * static_cast<double>(i) + 0.1 * static_cast<double>(j);
  const auto all = mask_entries(DenseMatrix(6, 8, 1.0));
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.adam.learning_rate = 1e-3;
  cfg.loss.lambda = 0.0;
  const auto r = train(model::GegenGnn(small_config(), 7, 8, 3), bundle, y, all, {}, cfg);
  REQUIRE(r.trace.size() == 10);
  for (std::size_t e = 1; e < r.trace.size(); ++e) CHECK(r.trace[e].train_loss < r.trace[e - 1].train_loss);
  CHECK(std::isnan(r.trace[0].val_rmse));
  CHECK(r.best_epoch == 10);
}

TEST_CASE("training contracts") {
  Rng rng(3);
  const auto bundle = graphs::laplacian_bundle(testing::random_graph(6, rng));
  const DenseMatrix y = testing::random_dense(6, 8, rng);
  const DenseMatrix mask = random_mask(6, 8, 0.6, rng);
  std::vector<num::Entry> tr, val;
  for (const auto& e : mask_entries(mask)) (rng.bernoulli(0.7) ? tr : val).push_back(e);
  model::ModelConfig mc;
  mc.dropout = 0.2;
  const model::GegenGnn init(mc, 7, 8, 5);

  TrainConfig zero;
  zero.epochs = 0;
  const auto r0 = train(init, bundle, y, tr, val, zero);
  CHECK(r0.model.params() == init.params());
  CHECK(r0.trace.empty());

  TrainConfig cfg;
  cfg.epochs = 15;
  cfg.adam.learning_rate = 0.01;
  cfg.seed = 9;
  const auto a = train(init, bundle, y, tr, val, cfg);
  const auto b = train(init, bundle, y, tr, val, cfg);
  REQUIRE(a.trace.size() == 15);
  for (std::size_t e = 0; e < 15; ++e) {
    CHECK(a.trace[e].train_loss == b.trace[e].train_loss);
    CHECK(a.trace[e].val_rmse == b.trace[e].val_rmse);
  }
  CHECK(a.model.params() == b.model.params());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a.trace) best = std::min(best, p.val_rmse);
  CHECK(a.best_val_rmse == best);
  CHECK(a.trace[a.best_epoch - 1].val_rmse == best);
  CHECK(rmse_on(a.model.predict(bundle, model_input(y, tr)), y, val) == doctest::Approx(best).epsilon(1e-12));

  CHECK_THROWS_AS(train(init, bundle, y, {}, val, cfg), ContractError);
  CHECK_THROWS_AS(train(init, bundle, DenseMatrix(6, 9), tr, val, cfg), ShapeError);

  DenseMatrix huge = y;
  huge(0, 0) = 1e300;
  try {
    (void)train(init, bundle, huge, tr, val, cfg);
    FAIL("expected divergence");
  } catch (const TrainingDiverged& e) {
    CHECK(e.epoch() == 0);
  }

  testing::TempDir dir("trace");
  write_trace_csv(dir.path() / "trace.csv", a.trace);
  std::ifstream in(dir.path() / "trace.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "epoch,train_loss,val_rmse");
}

TEST_CASE("convex reconstruction with lambda zero is the zero fill") {
  Rng rng(4);
  const auto bundle = graphs::laplacian_bundle(testing::random_graph(5, rng));
  const DenseMatrix y = testing::random_dense(5, 7, rng);
  const DenseMatrix mask = random_mask(5, 7, 0.5, rng);
  ConvexSpec spec;
  spec.lambda = 0.0;
  const auto r = convex_reconstruct(y, mask, bundle, spec);
  CHECK(r.converged);
  CHECK(num::max_abs_diff(r.x, num::hadamard(mask, y)) < 1e-12);
}

TEST_CASE("full sampling with small lambda recovers the signal") {
  Rng rng(5);
  const auto bundle = graphs::laplacian_bundle(testing::random_graph(5, rng));
  const DenseMatrix y = testing::random_dense(5, 6, rng);
  const DenseMatrix full(5, 6, 1.0);
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda : {1e-1, 1e-2, 1e-3, 1e-4}) {
    ConvexSpec spec;
    spec.lambda = lambda;
    const double err = num::max_abs_diff(convex_reconstruct(y, full, bundle, spec).x, y);
    CHECK(err < 50 * lambda);
    CHECK(err < previous);
    previous = err;
  }
}

TEST_CASE("conjugate gradient matches a dense solve") {
  const auto path = testing::path_graph(2);
  const auto bundle = graphs::laplacian_bundle(path);
  const DenseMatrix y{{1.0, 2.0}, {-0.5, 3.0}};
  const DenseMatrix mask{{1, 0}, {1, 1}};
  for (auto variant : {ConvexVariant::tgsr, ConvexVariant::graphtrss}) {
    ConvexSpec spec;
    spec.variant = variant;
    spec.lambda = 0.7;
    const auto r = convex_reconstruct(y, mask, bundle, spec);
    const DenseMatrix want = dense_solve(y, mask, bundle.laplacian->to_dense(), 0.7, spec.shift());
    CHECK(num::max_abs_diff(r.x, want) < 1e-9);
  }

  Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const auto b = graphs::laplacian_bundle(testing::random_graph(6, rng));
    const DenseMatrix yy = testing::random_dense(6, 9, rng);
    const DenseMatrix mm = random_mask(6, 9, 0.4, rng);
    for (bool precondition : {true, false}) {
      ConvexSpec spec;
      spec.lambda = rng.uniform(0.1, 3.0);
      spec.precondition = precondition;
      spec.tolerance = 1e-11;
      const auto r = convex_reconstruct(yy, mm, b, spec);
      CHECK(r.converged);
      CHECK(num::max_abs_diff(r.x, dense_solve(yy, mm, b.laplacian->to_dense(), spec.lambda, spec.epsilon)) < 1e-9);
    }
  }
}

TEST_CASE("normal operator matches the dense matrix") {
  Rng rng(7);
  const auto b = graphs::laplacian_bundle(testing::random_graph(4, rng));
  const DenseMatrix mask = random_mask(4, 5, 0.5, rng);
  const DenseMatrix x = testing::random_dense(4, 5, rng);
  ConvexSpec spec;
  spec.lambda = 1.3;
  const Eigen::MatrixXd a = dense_normal_matrix(mask, b.laplacian->to_dense(), 1.3, spec.epsilon);
  Eigen::VectorXd v(20);
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t i = 0; i < 4; ++i) v(static_cast<Eigen::Index>(j * 4 + i)) = x(i, j);
  const Eigen::VectorXd av = a * v;
  const DenseMatrix got = apply_normal_operator(x, mask, *b.laplacian, spec);
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t i = 0; i < 4; ++i) CHECK(got(i, j) == doctest::Approx(av(static_cast<Eigen::Index>(j * 4 + i))));
}

TEST_CASE("objective properties at the solution") {
  Rng rng(8);
  CHECK(objective_value(DenseMatrix(3, 4), DenseMatrix(3, 4), DenseMatrix(3, 4, 1.0),
                        *graphs::laplacian_bundle(testing::random_graph(3, rng)).laplacian, ConvexSpec{}) == 0.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto b = graphs::laplacian_bundle(testing::random_graph(8, rng));
    const DenseMatrix y = testing::random_dense(8, 12, rng);
    const DenseMatrix mask = random_mask(8, 12, 0.5, rng);
    for (auto variant : {ConvexVariant::tgsr, ConvexVariant::graphtrss}) {
      ConvexSpec spec;
      spec.variant = variant;
      spec.lambda = rng.uniform(0.2, 2.0);
      const auto r = convex_reconstruct(y, mask, b, spec);
      CHECK(r.converged);
      CHECK(r.residual < spec.tolerance);
      CHECK(num::frobenius_norm(objective_gradient(r.x, y, mask, *b.laplacian, spec)) < 10 * spec.tolerance);
      const double start = objective_value(num::hadamard(mask, y), y, mask, *b.laplacian, spec);
      CHECK(objective_value(r.x, y, mask, *b.laplacian, spec) <= start);
      REQUIRE(r.objective_history.size() == r.iterations + 1);
      CHECK(r.objective_history.front() == doctest::Approx(start));
      for (std::size_t k = 1; k < r.objective_history.size(); ++k) {
        CHECK(r.objective_history[k] <= r.objective_history[k - 1] + 1e-12 * std::abs(start));
      }
      CHECK(r.residual_history.size() == r.iterations + 1);
    }
  }
}

TEST_CASE("sobolev shift does not worsen conditioning") {
  Rng rng(9);
  testing::WarningCapture quiet;
  std::size_t finite = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + rng.below(6);
    const std::size_t m = 100 / n;
    const auto b = graphs::laplacian_bundle(testing::random_graph(n, rng));
    const DenseMatrix mask = random_mask(n, m, trial % 2 ? 0.4 : 0.9, rng);
    const DenseMatrix l = b.laplacian->to_dense();
    const double lambda = rng.uniform(0.5, 2.0);
    const double tgsr = condition_number(dense_normal_matrix(mask, l, lambda, 0.0));
    const double trss = condition_number(dense_normal_matrix(mask, l, lambda, 0.05));
    CHECK(std::isfinite(trss));
    CHECK(trss <= tgsr);
    if (std::isfinite(tgsr)) ++finite;
  }
  CHECK(finite > 0);
}

TEST_CASE("non-convergence returns the best iterate with a warning") {
  Rng rng(10);
  const auto b = graphs::laplacian_bundle(testing::random_graph(8, rng));
  const DenseMatrix y = testing::random_dense(8, 10, rng);
  const DenseMatrix mask = random_mask(8, 10, 0.5, rng);
  ConvexSpec spec;
  spec.max_iterations = 2;
  testing::WarningCapture warnings;
  const auto r = convex_reconstruct(y, mask, b, spec);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
  CHECK(warnings.messages.size() == 1);
  double best = std::numeric_limits<double>::infinity();
  for (double v : r.residual_history) best = std::min(best, v);
  CHECK(r.residual == best);

  spec.max_iterations = 100;
  spec.epsilon = 0.0;
  CHECK_THROWS_AS(spec.validate(), ParameterError);
  CHECK(parse_convex_variant("tgsr") == ConvexVariant::tgsr);
  CHECK_THROWS_AS(parse_convex_variant("admm"), ParameterError);
}

TEST_CASE("mean impute") {
  const DenseMatrix y{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const DenseMatrix mask{{1, 0, 1}, {0, 0, 0}, {0, 1, 0}};
  const DenseMatrix got = mean_impute(y, mask);
  CHECK(got == DenseMatrix{{1, 2, 3}, {4, 4, 4}, {8, 8, 8}});
}
