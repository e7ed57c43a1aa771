#pragma once

#include <cstddef>
#include <vector>

#include "gegen/graphs/graph.hpp"

namespace gegen::graphs {

struct GraphLearnConfig {
  double gamma = 0.0;  // l1 sparsity weight, >= 0
  double beta = 1.0;   // GBF shift, > 0
  double step_size = 0.1;
  std::size_t max_iterations = 500;
  double tolerance = 1e-8;  // relative objective change
};

struct LearnedGraph {
  Graph graph;
  // Objective after every accepted iteration; entry 0 is the starting point.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
  bool converged = false;
};

// Maximum-likelihood fit with the graph-based filter h(lambda) = 1/(lambda + beta):
//   min_w  tr((L(w) + beta I) S) - log det(L(w) + beta I) + gamma ||L(w)||_1
// over nonnegative edge weights w, with L(w) rebuilt from w so the Laplacian
// constraints hold by construction. Projected gradient with step halving.
LearnedGraph learn_graph_from_covariance(const DenseMatrix& covariance, const GraphLearnConfig& cfg);

// samples is n x N (one graph signal per row); S is the 1/n sample covariance.
LearnedGraph learn_graph(const DenseMatrix& samples, const GraphLearnConfig& cfg);

DenseMatrix sample_covariance(const DenseMatrix& samples);

// Objective value for a dense weight matrix (symmetric, zero diagonal).
double graph_learning_objective(const DenseMatrix& weights, const DenseMatrix& covariance,
                                const GraphLearnConfig& cfg);

}  // namespace gegen::graphs
