#include "gegen/graphs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "gegen/io/csv.hpp"
#include "gegen/log.hpp"
#include "gegen/num/errors.hpp"
#include "gegen/num/rng.hpp"

namespace gegen::graphs {

Graph make_graph(SparseMatrix adjacency, std::optional<DenseMatrix> coords) {
  if (adjacency.rows() != adjacency.cols()) throw ShapeError("make_graph: adjacency not square");
  const std::size_t n = adjacency.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& off = adjacency.row_offsets();
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) {
      const std::size_t j = adjacency.col_indices()[p];
      const double w = adjacency.values()[p];
      if (i == j && w != 0.0) throw DomainError("make_graph: nonzero self-loop at node " + std::to_string(i));
      if (w < 0.0) throw DomainError("make_graph: negative edge weight");
    }
  }
  if (!adjacency.is_symmetric()) throw DomainError("make_graph: adjacency is not symmetric");
  if (coords && coords->rows() != n) throw ShapeError("make_graph: coordinate count differs from node count");
  Graph g{n, std::make_shared<const SparseMatrix>(std::move(adjacency)), std::move(coords)};
  if (n > 0 && !is_connected(g)) warn("graph with " + std::to_string(n) + " nodes is disconnected");
  return g;
}

bool is_connected(const Graph& g) {
  if (g.nodes == 0) return true;
  std::vector<char> seen(g.nodes, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t visited = 1;
  const auto& off = g.adjacency->row_offsets();
  const auto& idx = g.adjacency->col_indices();
  const auto& val = g.adjacency->values();
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t p = off[u]; p < off[u + 1]; ++p) {
      const std::size_t v = idx[p];
      if (val[p] > 0.0 && !seen[v]) {
        seen[v] = 1;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  return visited == g.nodes;
}

Graph knn_gaussian_graph(const DenseMatrix& coords, std::size_t k, std::optional<double> sigma) {
  const std::size_t n = coords.rows();
  if (n < 2) throw ParameterError("knn_gaussian_graph: need at least 2 nodes");
  if (k == 0 || k >= n) throw ParameterError("knn_gaussian_graph: k must satisfy 0 < k < N");
  if (!coords.all_finite()) throw DomainError("knn_gaussian_graph: non-finite coordinates");
  if (sigma && !(*sigma > 0.0)) throw ParameterError("knn_gaussian_graph: sigma must be positive");

  auto dist = [&](std::size_t a, std::size_t b) {
    double acc = 0.0;
    for (std::size_t d = 0; d < coords.cols(); ++d) {
      const double diff = coords(a, d) - coords(b, d);
      acc += diff * diff;
    }
    return std::sqrt(acc);
  };

  // selected(i, j) for the union symmetrization.
  std::vector<std::vector<char>> selected(n, std::vector<char>(n, 0));
  std::vector<std::size_t> order(n - 1);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[j] = dist(i, j);
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) order[c++] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    for (std::size_t r = 0; r < k; ++r) selected[i][order[r]] = 1;
  }

  struct Edge {
    std::size_t i, j;
    double d;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (selected[i][j] || selected[j][i]) edges.push_back({i, j, dist(i, j)});

  double s = 0.0;
  if (sigma) {
    s = *sigma;
  } else {
    for (const auto& e : edges) s += e.d;
    s /= static_cast<double>(edges.size());
    // All retained distances are zero: every weight is exp(0) = 1 regardless.
    if (!(s > 0.0)) s = 1.0;
  }

  std::vector<num::Triplet> t;
  for (const auto& e : edges) {
    const double w = std::exp(-e.d * e.d / (2.0 * s * s));
    t.push_back({e.i, e.j, w});
    t.push_back({e.j, e.i, w});
  }
  return make_graph(SparseMatrix::from_triplets(n, n, std::move(t)), coords);
}

SparseMatrix combinatorial_laplacian(const SparseMatrix& adjacency) {
  const std::size_t n = adjacency.rows();
  std::vector<double> deg(n, 0.0);
  const auto& off = adjacency.row_offsets();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) deg[i] += adjacency.values()[p];
  return SparseMatrix::diagonal(deg).linear_combination(1.0, adjacency, -1.0);
}

PowerIterationResult largest_eigenvalue(const SparseMatrix& m, SpectralOptions opts) {
  const std::size_t n = m.rows();
  PowerIterationResult res;
  if (n == 0) return res;
  num::Rng rng(0x5EEDULL);
  DenseMatrix x(n, 1);
  for (double& v : x.data()) v = rng.uniform(0.5, 1.5) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
  x *= 1.0 / num::frobenius_norm(x);
  double prev = 0.0;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    DenseMatrix y = num::spmm(m, x);
    const double rq = num::dot(x, y);
    const double norm = num::frobenius_norm(y);
    res.value = rq;
    res.iterations = it;
    if (norm == 0.0) {
      res.converged = false;
      return res;
    }
    if (it > 1 && std::abs(rq - prev) <= opts.tolerance * std::abs(rq)) {
      res.converged = true;
      return res;
    }
    prev = rq;
    x = y * (1.0 / norm);
  }
  return res;
}

LaplacianBundle laplacian_bundle(const Graph& g, SpectralOptions opts) {
  const std::size_t n = g.nodes;
  LaplacianBundle b;
  b.adjacency = g.adjacency;
  auto lap = combinatorial_laplacian(*g.adjacency);
  b.degrees.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) b.degrees[i] = lap.at(i, i);

  const auto power = largest_eigenvalue(lap, opts);
  double lambda = power.value;
  if (!power.converged || !(lambda > 0.0)) {
    const double max_deg = n ? *std::max_element(b.degrees.begin(), b.degrees.end()) : 0.0;
    lambda = 2.0 * max_deg;
    b.lambda_fallback = true;
    warn("power iteration did not converge; using Gershgorin bound " + io::format_double(lambda));
  }
  lambda *= 1.0 + opts.margin;
  b.lambda_max = lambda;

  if (lambda > 0.0) {
    b.scaled = std::make_shared<const SparseMatrix>(
        lap.linear_combination(2.0 / lambda, SparseMatrix::identity(n), -1.0));
  } else {
    warn("graph has no edges; scaled Laplacian is -I");
    b.scaled = std::make_shared<const SparseMatrix>(SparseMatrix::identity(n).scaled(-1.0));
  }

  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(b.degrees[i] + 1.0);
  std::vector<num::Triplet> t;
  const auto& a = *g.adjacency;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, inv_sqrt[i] * inv_sqrt[i]});
    for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      const std::size_t j = a.col_indices()[p];
      t.push_back({i, j, inv_sqrt[i] * a.values()[p] * inv_sqrt[j]});
    }
  }
  b.gcn_propagation = std::make_shared<const SparseMatrix>(SparseMatrix::from_triplets(n, n, std::move(t)));
  b.laplacian = std::make_shared<const SparseMatrix>(std::move(lap));
  return b;
}

double smoothness_s2(const DenseMatrix& x, const SparseMatrix& laplacian) {
  if (laplacian.rows() != laplacian.cols() || laplacian.cols() != x.rows()) {
    throw ShapeError("smoothness_s2: signal has " + std::to_string(x.rows()) +
                     " rows but Laplacian is " + std::to_string(laplacian.rows()) + "x" +
                     std::to_string(laplacian.cols()));
  }
  return num::dot(x, num::spmm(laplacian, x));
}

SparseMatrix temporal_diff_matrix(std::size_t steps) {
  if (steps < 2) throw ParameterError("temporal_diff_matrix: need at least 2 time steps");
  std::vector<num::Triplet> t;
  t.reserve(2 * (steps - 1));
  for (std::size_t j = 0; j + 1 < steps; ++j) {
    t.push_back({j, j, -1.0});
    t.push_back({j + 1, j, 1.0});
  }
  return SparseMatrix::from_triplets(steps, steps - 1, std::move(t));
}

void write_edge_list(std::ostream& out, const Graph& g) {
  const auto& a = *g.adjacency;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      const std::size_t j = a.col_indices()[p];
      if (i < j) out << i << ',' << j << ',' << io::format_double(a.values()[p]) << '\n';
    }
  }
}

void write_edge_list(const std::filesystem::path& path, const Graph& g) {
  auto out = io::open_output(path);
  write_edge_list(out, g);
}

Graph read_edge_list(const std::filesystem::path& path, std::optional<std::size_t> nodes) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open '" + path.string() + "'");
  std::string line;
  std::string body;
  bool first = true;
  while (std::getline(in, line)) {
    if (first && line.rfind("i,j", 0) == 0) {
      first = false;
      body += '\n';  // keep row numbers aligned with the file
      continue;
    }
    first = false;
    body += line + '\n';
  }
  std::istringstream ss(body);
  const DenseMatrix e = io::parse_matrix_csv(ss, path.string());
  if (e.rows() > 0 && e.cols() != 3) throw IngestError(path.string() + ": expected i,j,weight rows");
  std::size_t n = nodes.value_or(0);
  std::vector<num::Triplet> t;
  for (std::size_t r = 0; r < e.rows(); ++r) {
    const double fi = e(r, 0);
    const double fj = e(r, 1);
    if (fi < 0 || fj < 0 || fi != std::floor(fi) || fj != std::floor(fj)) {
      throw IngestError(path.string() + ": invalid node index on edge row " + std::to_string(r + 1));
    }
    const auto i = static_cast<std::size_t>(fi);
    const auto j = static_cast<std::size_t>(fj);
    if (!nodes) n = std::max({n, i + 1, j + 1});
    if (i >= n || j >= n) throw IngestError(path.string() + ": node index exceeds node count");
    t.push_back({i, j, e(r, 2)});
    t.push_back({j, i, e(r, 2)});
  }
  return make_graph(SparseMatrix::from_triplets(n, n, std::move(t)));
}

}  // namespace gegen::graphs
