#include "gegen/harness/dataset.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gegen/io/csv.hpp"
#include "gegen/num/errors.hpp"
#include "gegen/num/rng.hpp"

namespace gegen::harness {

void Dataset::validate() const {
  if (signal.rows() < 2 || signal.cols() < 2) {
    throw IngestError("dataset '" + name + "': need at least 2 nodes and 2 time steps");
  }
  for (std::size_t i = 0; i < signal.rows(); ++i)
    for (std::size_t j = 0; j < signal.cols(); ++j)
      if (!std::isfinite(signal(i, j))) {
        throw IngestError("dataset '" + name + "': non-finite value at row " + std::to_string(i + 1) +
                          ", column " + std::to_string(j + 1));
      }
  if (coords && coords->rows() != signal.rows()) {
    throw IngestError("dataset '" + name + "': " + std::to_string(coords->rows()) +
                      " coordinate rows for " + std::to_string(signal.rows()) + " nodes");
  }
}

Dataset load_dataset(const std::filesystem::path& signal_csv,
                     const std::optional<std::filesystem::path>& coords_csv, std::string name) {
  Dataset d;
  d.name = name.empty() ? signal_csv.stem().string() : std::move(name);
  d.signal = io::read_matrix_csv(signal_csv);
  if (coords_csv) d.coords = io::read_matrix_csv(*coords_csv);
  d.validate();
  return d;
}

void SynthConfig::validate() const {
  if (nodes < 3) throw ParameterError("synth: need at least 3 nodes");
  if (steps < 2) throw ParameterError("synth: need at least 2 time steps");
  if (bandwidth < 1 || bandwidth > nodes) {
    throw ParameterError("synth: bandwidth must lie in [1, nodes]");
  }
  if (knn < 1 || knn >= nodes) throw ParameterError("synth: knn must lie in [1, nodes)");
  if (!(temporal_cycles >= 0.0)) throw ParameterError("synth: temporal_cycles must be >= 0");
  if (!(noise >= 0.0)) throw ParameterError("synth: noise must be >= 0");
}

namespace {

constexpr std::size_t kMaxGraphAttempts = 100;

DenseMatrix laplacian_eigenvectors(const num::SparseMatrix& laplacian) {
  const auto n = static_cast<Eigen::Index>(laplacian.rows());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < laplacian.rows(); ++i)
    for (std::size_t p = laplacian.row_offsets()[i]; p < laplacian.row_offsets()[i + 1]; ++p)
      l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(laplacian.col_indices()[p])) =
          laplacian.values()[p];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l);
  if (solver.info() != Eigen::Success) throw OracleError("synth: eigendecomposition failed");
  DenseMatrix u(laplacian.rows(), laplacian.rows());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      u(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = solver.eigenvectors()(i, j);
  return u;
}

}  // namespace

SynthResult synth_dataset(const SynthConfig& cfg) {
  cfg.validate();
  const num::Rng root(cfg.seed);
  const std::size_t n = cfg.nodes;
  const std::size_t m = cfg.steps;

  std::optional<graphs::Graph> graph;
  DenseMatrix coords;
  for (std::size_t attempt = 0; attempt < kMaxGraphAttempts && !graph; ++attempt) {
    num::Rng rng = root.split(attempt);
    coords = DenseMatrix(n, 2);
    for (double& c : coords.data()) c = rng.uniform();
    graphs::Graph g = graphs::knn_gaussian_graph(coords, cfg.knn);
    if (graphs::is_connected(g)) graph = std::move(g);
  }
  if (!graph) throw ContractError("synth: could not draw a connected graph; increase knn");

  const num::SparseMatrix laplacian = graphs::combinatorial_laplacian(*graph->adjacency);
  const DenseMatrix u = laplacian_eigenvectors(laplacian);

  num::Rng rng = root.split(kMaxGraphAttempts);
  DenseMatrix coeffs(cfg.bandwidth, m);
  for (std::size_t b = 0; b < cfg.bandwidth; ++b) {
    const double amplitude = std::sqrt(static_cast<double>(n)) / (1.0 + static_cast<double>(b));
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double freq = cfg.temporal_cycles * rng.uniform(0.5, 1.0);
    for (std::size_t t = 0; t < m; ++t) {
      coeffs(b, t) = amplitude *
                     std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(t) / static_cast<double>(m) + phase);
    }
  }

  DenseMatrix x(n, m, cfg.offset);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t b = 0; b < cfg.bandwidth; ++b)
      for (std::size_t t = 0; t < m; ++t) x(i, t) += u(i, b) * coeffs(b, t);
  if (cfg.noise > 0.0) {
    for (double& v : x.data()) v += cfg.noise * rng.normal();
  }

  const double s2_time = graphs::smoothness_s2(num::dense_sparse(x, graphs::temporal_diff_matrix(m)), laplacian);
  const double s2_raw = graphs::smoothness_s2(x, laplacian);
  if (s2_time > s2_raw) {
    throw ContractError("synth: S2(X D_h) = " + io::format_double(s2_time) + " exceeds S2(X) = " +
                        io::format_double(s2_raw) + "; lower temporal_cycles or noise");
  }

  SynthResult out{Dataset{"synthetic", std::move(x), coords}, std::move(*graph), u};
  out.dataset.validate();
  return out;
}

std::vector<Entry> SamplingMask::sampled() const {
  std::vector<Entry> out;
  for (std::size_t i = 0; i < j.rows(); ++i)
    for (std::size_t c = 0; c < j.cols(); ++c)
      if (j(i, c) != 0.0) out.push_back({i, c});
  return out;
}

std::vector<Entry> SamplingMask::unsampled() const {
  std::vector<Entry> out;
  for (std::size_t i = 0; i < j.rows(); ++i)
    for (std::size_t c = 0; c < j.cols(); ++c)
      if (j(i, c) == 0.0) out.push_back({i, c});
  return out;
}

SamplingMask make_mask(std::size_t rows, std::size_t cols, double density, std::uint64_t seed) {
  if (!(density > 0.0 && density < 1.0)) throw ParameterError("make_mask: density must lie in (0, 1)");
  if (rows == 0 || cols == 0) throw ShapeError("make_mask: empty shape");
  const std::size_t total = rows * cols;
  const auto count = static_cast<std::size_t>(std::llround(density * static_cast<double>(total)));
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  num::Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  SamplingMask mask{DenseMatrix(rows, cols), density, seed};
  for (std::size_t k = 0; k < count; ++k) mask.j.data()[order[k]] = 1.0;
  return mask;
}

SamplingMask read_mask(const std::filesystem::path& path) {
  SamplingMask mask{io::read_matrix_csv(path), 0.0, 0};
  double ones = 0.0;
  for (std::size_t i = 0; i < mask.j.rows(); ++i)
    for (std::size_t c = 0; c < mask.j.cols(); ++c) {
      const double v = mask.j(i, c);
      if (v != 0.0 && v != 1.0) {
        throw IngestError(path.string() + ": mask value at row " + std::to_string(i + 1) + ", column " +
                          std::to_string(c + 1) + " is not 0 or 1");
      }
      ones += v;
    }
  mask.density = ones / static_cast<double>(mask.j.size());
  return mask;
}

}  // namespace gegen::harness
