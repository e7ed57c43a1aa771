#include "gegen/graphs/learn.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "gegen/log.hpp"
#include "gegen/num/errors.hpp"

namespace gegen::graphs {

namespace {

using Mat = Eigen::MatrixXd;

Mat shifted_laplacian(const DenseMatrix& w, double beta) {
  const auto n = static_cast<Eigen::Index>(w.rows());
  Mat m = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double wij = w(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      m(i, j) = -wij;
      m(i, i) += wij;
    }
    m(i, i) += beta;
  }
  return m;
}

Mat to_eigen(const DenseMatrix& d) {
  Mat m(static_cast<Eigen::Index>(d.rows()), static_cast<Eigen::Index>(d.cols()));
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d(i, j);
  return m;
}

void validate(const GraphLearnConfig& cfg) {
  if (!(cfg.beta > 0.0)) throw ParameterError("learn_graph: beta must be > 0");
  if (!(cfg.gamma >= 0.0)) throw ParameterError("learn_graph: gamma must be >= 0");
  if (!(cfg.step_size > 0.0)) throw ParameterError("learn_graph: step size must be > 0");
}

double objective(const DenseMatrix& w, const Mat& s, const GraphLearnConfig& cfg, Mat* inverse) {
  const Mat m = shifted_laplacian(w, cfg.beta);
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const Mat& l = llt.matrixL();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) logdet += 2.0 * std::log(l(i, i));
  double l1 = 0.0;
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = i + 1; j < w.cols(); ++j) l1 += 4.0 * w(i, j);
  if (inverse) *inverse = llt.solve(Mat::Identity(m.rows(), m.cols()));
  return (m.cwiseProduct(s)).sum() - logdet + cfg.gamma * l1;
}

}  // namespace

DenseMatrix sample_covariance(const DenseMatrix& samples) {
  const std::size_t n = samples.rows();
  const std::size_t p = samples.cols();
  if (n < 2) throw ParameterError("sample_covariance: need at least 2 samples");
  std::vector<double> mean(p, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < p; ++c) mean[c] += samples(r, c);
  for (double& m : mean) m /= static_cast<double>(n);
  DenseMatrix s(p, p);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b)
        s(a, b) += (samples(r, a) - mean[a]) * (samples(r, b) - mean[b]);
  s *= 1.0 / static_cast<double>(n);
  return s;
}

double graph_learning_objective(const DenseMatrix& weights, const DenseMatrix& covariance,
                                const GraphLearnConfig& cfg) {
  validate(cfg);
  return objective(weights, to_eigen(covariance), cfg, nullptr);
}

LearnedGraph learn_graph_from_covariance(const DenseMatrix& covariance, const GraphLearnConfig& cfg) {
  validate(cfg);
  const std::size_t n = covariance.rows();
  if (n != covariance.cols() || n < 2) throw ShapeError("learn_graph: covariance must be square, N >= 2");
  const Mat s = to_eigen(covariance);

  LearnedGraph out;
  DenseMatrix w(n, n);
  Mat k;
  double f = objective(w, s, cfg, &k);
  out.objective_trace.push_back(f);
  double eta = cfg.step_size;

  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    DenseMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        g(i, j) = s(ii, ii) + s(jj, jj) - 2.0 * s(ii, jj) - (k(ii, ii) + k(jj, jj) - 2.0 * k(ii, jj)) +
                  4.0 * cfg.gamma;
      }
    }
    bool accepted = false;
    bool moved = false;
    DenseMatrix trial(n, n);
    double f_trial = f;
    Mat k_trial;
    for (int halvings = 0; halvings < 60; ++halvings) {
      moved = false;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const double v = std::max(0.0, w(i, j) - eta * g(i, j));
          moved = moved || v != w(i, j);
          trial(i, j) = v;
          trial(j, i) = v;
        }
      }
      if (!moved) break;
      f_trial = objective(trial, s, cfg, &k_trial);
      if (f_trial <= f) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    out.iterations = it;
    if (!moved) {
      // Projected gradient is zero: stationary point.
      out.converged = true;
      break;
    }
    if (!accepted) {
      warn("learn_graph: no decrease after step-size halving; returning best iterate");
      break;
    }
    const double rel = (f - f_trial) / std::max(1.0, std::abs(f));
    w = trial;
    k = k_trial;
    f = f_trial;
    out.objective_trace.push_back(f);
    eta *= 2.0;
    if (rel < cfg.tolerance) {
      out.converged = true;
      break;
    }
  }

  std::vector<num::Triplet> t;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && w(i, j) > 0.0) t.push_back({i, j, w(i, j)});
  out.graph = make_graph(SparseMatrix::from_triplets(n, n, std::move(t)));
  return out;
}

LearnedGraph learn_graph(const DenseMatrix& samples, const GraphLearnConfig& cfg) {
  if (samples.rows() < 2) throw ParameterError("learn_graph: need at least 2 samples");
  return learn_graph_from_covariance(sample_covariance(samples), cfg);
}

}  // namespace gegen::graphs
