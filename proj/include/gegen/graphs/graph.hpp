#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "gegen/num/dense.hpp"
#include "gegen/num/sparse.hpp"

namespace gegen::graphs {

using num::DenseMatrix;
using num::SparseMatrix;

// Undirected weighted graph. The adjacency is symmetric, nonnegative and has
// a zero diagonal; make_graph enforces this. Disconnected graphs are accepted
// with a warning.
struct Graph {
  std::size_t nodes = 0;
  std::shared_ptr<const SparseMatrix> adjacency;
  // N x dim node locations, when known.
  std::optional<DenseMatrix> coords;

  std::size_t edge_count() const { return adjacency ? adjacency->nnz() / 2 : 0; }
};

Graph make_graph(SparseMatrix adjacency, std::optional<DenseMatrix> coords = std::nullopt);
bool is_connected(const Graph& g);

// k-nearest-neighbour graph with Gaussian weights exp(-d^2 / (2 sigma^2)).
// An edge exists if either endpoint selects the other. When sigma is not
// given it defaults to the mean distance over the retained edges.
Graph knn_gaussian_graph(const DenseMatrix& coords, std::size_t k,
                         std::optional<double> sigma = std::nullopt);

struct LaplacianBundle {
  std::shared_ptr<const SparseMatrix> adjacency;
  std::shared_ptr<const SparseMatrix> laplacian;  // L = D - A
  std::vector<double> degrees;
  double lambda_max = 0.0;  // inflated estimate actually used for scaling
  bool lambda_fallback = false;
  std::shared_ptr<const SparseMatrix> scaled;  // 2 L / lambda_max - I
  // D~^{-1/2} (A + I) D~^{-1/2}, used by the GCN baseline.
  std::shared_ptr<const SparseMatrix> gcn_propagation;

  std::size_t nodes() const { return degrees.size(); }
};

struct SpectralOptions {
  std::size_t max_iterations = 200;
  double tolerance = 1e-9;
  double margin = 1e-6;
};

SparseMatrix combinatorial_laplacian(const SparseMatrix& adjacency);

// Power iteration on L; returns the Rayleigh quotient and whether it met the
// tolerance within the iteration budget.
struct PowerIterationResult {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};
PowerIterationResult largest_eigenvalue(const SparseMatrix& symmetric, SpectralOptions opts = {});

LaplacianBundle laplacian_bundle(const Graph& g, SpectralOptions opts = {});

// tr(X^T L X); for a single column this is x^T L x.
double smoothness_s2(const DenseMatrix& x, const SparseMatrix& laplacian);

// M x (M-1) operator with -1 on the diagonal and +1 on the subdiagonal, so
// X * D_h = [x2 - x1, ..., xM - x(M-1)].
SparseMatrix temporal_diff_matrix(std::size_t steps);

// Edge list with one `i,j,weight` line per edge, i < j, no header.
void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list(const std::filesystem::path& path, const Graph& g);
// Accepts an optional `i,j,weight` header line. Node count is inferred from
// the largest index unless given.
Graph read_edge_list(const std::filesystem::path& path, std::optional<std::size_t> nodes = {});

}  // namespace gegen::graphs
