#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gegen/graphs/graph.hpp"
#include "gegen/num/dense.hpp"

namespace gegen::harness {

using num::DenseMatrix;
using num::Entry;

struct Dataset {
  std::string name;
  DenseMatrix signal;  // N x M
  std::optional<DenseMatrix> coords;

  std::size_t nodes() const { return signal.rows(); }
  std::size_t steps() const { return signal.cols(); }
  void validate() const;
};

Dataset load_dataset(const std::filesystem::path& signal_csv,
                     const std::optional<std::filesystem::path>& coords_csv = std::nullopt,
                     std::string name = {});

struct SynthConfig {
  std::size_t nodes = 30;
  std::size_t steps = 40;
  std::size_t bandwidth = 5;
  // Oscillation cycles of the GFT coefficients over the whole horizon; 0 makes
  // every column identical.
  double temporal_cycles = 2.0;
  double noise = 0.05;
  std::size_t knn = 5;
  // Added to every entry through the constant eigenvector.
  double offset = 5.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthResult {
  Dataset dataset;
  graphs::Graph graph;
  // Laplacian eigenvectors in ascending eigenvalue order, one per column.
  DenseMatrix gft_basis;
};

// Random geometric graph in the unit square (k-NN Gaussian weights) and a
// signal whose columns are bandwidth-limited in the GFT with slowly varying
// coefficients, plus Gaussian noise. Throws ContractError if the result is not
// smoother along time than across the graph.
SynthResult synth_dataset(const SynthConfig& cfg);

struct SamplingMask {
  DenseMatrix j;  // 0/1
  double density = 0.0;
  std::uint64_t seed = 0;

  std::vector<Entry> sampled() const;
  std::vector<Entry> unsampled() const;
};

// Exactly round(density * N * M) ones placed uniformly without replacement.
SamplingMask make_mask(std::size_t rows, std::size_t cols, double density, std::uint64_t seed);

// Accepts any 0/1 CSV; density is recomputed from the contents.
SamplingMask read_mask(const std::filesystem::path& path);

}  // namespace gegen::harness
