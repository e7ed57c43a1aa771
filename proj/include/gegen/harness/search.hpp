#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "gegen/graphs/graph.hpp"
#include "gegen/model/gegen_gnn.hpp"
#include "gegen/num/rng.hpp"
#include "gegen/recon/recon.hpp"

namespace gegen::harness {

using num::DenseMatrix;
using num::Entry;

// Everything a single GNN fit needs besides data.
struct Hyperparams {
  model::ModelConfig model{};
  double learning_rate = 0.017;
  double weight_decay = 4.6e-4;
  recon::LossConfig loss{};
  std::size_t epochs = 2000;

  void validate() const;
  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

// xi = 0.017, eps = 0.04, zeta = 4, alpha = 1.17, dropout 0.03,
// lambda = 1.5e-4, 1 x 9 convolution, 1 x 2 linear, weight decay 4.6e-4.
Hyperparams appendix_d_preset();

struct IntRange {
  std::int64_t lo;
  std::int64_t hi;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};
struct RealRange {
  double lo;
  double hi;
  friend bool operator==(const RealRange&, const RealRange&) = default;
};

// A range with lo == hi pins that hyperparameter.
struct SearchSpace {
  IntRange conv_layers{1, 4};
  IntRange conv_hidden{2, 10};
  IntRange linear_layers{0, 1};
  IntRange linear_hidden{2, 10};
  IntRange zeta{1, 5};
  RealRange learning_rate{0.005, 0.05};
  RealRange dropout{0.01, 0.5};
  RealRange lambda{1e-4, 1e-3};
  RealRange epsilon{0.01, 0.05};
  // The lower end is excluded because C_k^(-1/2) is undefined.
  RealRange alpha{-0.5, 1.5};

  void validate() const;
  // Every field consumes exactly one draw, pinned or not, so two spaces that
  // differ only in pinned fields produce matching draws for the rest.
  // Fields outside the space (kind, activation, weight decay, epochs) come from base.
  Hyperparams sample(num::Rng& rng, const Hyperparams& base) const;
  bool contains(const Hyperparams& h) const;

  friend bool operator==(const SearchSpace&, const SearchSpace&) = default;
};

// Runs body(i) for i in [0, count) on up to threads workers (0 = hardware
// concurrency). Results must be written to per-index slots.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

// Fits a fresh model with init and dropout streams derived from seed.
recon::TrainResult fit_gnn(const Hyperparams& h, const DenseMatrix& y, const graphs::LaplacianBundle& bundle,
                           std::span<const Entry> train, std::span<const Entry> validation,
                           std::uint64_t seed);

struct FoldSplit {
  std::vector<Entry> train;
  std::vector<Entry> validation;
};

// Independent random train_fraction / rest splits of the development set.
// Throws ConfigError when either side would be empty.
std::vector<FoldSplit> make_folds(std::span<const Entry> development, std::size_t folds,
                                  double train_fraction, std::uint64_t seed);

struct CvConfig {
  std::size_t trials = 300;
  std::size_t folds = 5;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  void validate() const;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::size_t fold = 0;
  double val_rmse = 0.0;  // +inf when the fit diverged
};

struct CvResult {
  std::vector<Hyperparams> candidates;
  std::vector<TrialRecord> table;  // trial-major
  std::vector<double> median_val_rmse;
  std::size_t best = 0;

  const Hyperparams& best_config() const { return candidates.at(best); }
};

// Index of the smallest median; ties go to the earlier trial.
std::size_t select_best(std::span<const double> medians);

// Every candidate sees the same fold splits and the same per-fold model seeds.
CvResult evaluate_configs(std::vector<Hyperparams> candidates, const DenseMatrix& y,
                          const graphs::LaplacianBundle& bundle, std::span<const Entry> development,
                          const CvConfig& cfg);

CvResult monte_carlo_cv(const DenseMatrix& y, const graphs::LaplacianBundle& bundle,
                        std::span<const Entry> development, const SearchSpace& space,
                        const Hyperparams& base, const CvConfig& cfg);

void write_trial_table(const std::filesystem::path& path, const CvResult& result);

}  // namespace gegen::harness
