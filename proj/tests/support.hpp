#pragma once

#include <unistd.h>

#include <Eigen/Dense>
#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "gegen/graphs/graph.hpp"
#include "gegen/log.hpp"
#include "gegen/num/dense.hpp"
#include "gegen/num/rng.hpp"
#include "gegen/num/sparse.hpp"

namespace testing {

using gegen::num::DenseMatrix;
using gegen::num::SparseMatrix;

inline DenseMatrix random_dense(std::size_t rows, std::size_t cols, gegen::num::Rng& rng, double lo = -1.0,
                                double hi = 1.0) {
  DenseMatrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(lo, hi);
  return m;
}

inline Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd e(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return e;
}

inline DenseMatrix from_eigen(const Eigen::MatrixXd& e) {
  DenseMatrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return m;
}

// Connected random geometric graph on n nodes.
inline gegen::graphs::Graph random_graph(std::size_t n, gegen::num::Rng& rng, std::size_t k = 3);

// Collects warnings for its lifetime.
class WarningCapture;

inline gegen::graphs::Graph random_graph(std::size_t n, gegen::num::Rng& rng, std::size_t k) {
  auto previous = gegen::set_warning_sink([](std::string_view) {});
  for (;;) {
    DenseMatrix coords = random_dense(n, 2, rng, 0.0, 1.0);
    auto g = gegen::graphs::knn_gaussian_graph(coords, std::min(k, n - 1));
    if (gegen::graphs::is_connected(g)) {
      gegen::set_warning_sink(previous);
      return g;
    }
  }
}

// Path 0 - 1 - ... - (n-1) with unit weights.
inline gegen::graphs::Graph path_graph(std::size_t n) {
  std::vector<gegen::num::Triplet> t;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    t.push_back({i, i + 1, 1.0});
    t.push_back({i + 1, i, 1.0});
  }
  return gegen::graphs::make_graph(SparseMatrix::from_triplets(n, n, std::move(t)));
}

// Collects warnings for its lifetime.
class WarningCapture {
 public:
  WarningCapture() {
    previous_ = gegen::set_warning_sink([this](std::string_view m) { messages.emplace_back(m); });
  }
  ~WarningCapture() { gegen::set_warning_sink(previous_); }
  std::vector<std::string> messages;

 private:
  gegen::WarningSink previous_;
};

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("gegen_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
