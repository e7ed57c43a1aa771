#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gegen/graphs/learn.hpp"
#include "gegen/harness/dataset.hpp"
#include "gegen/harness/metrics.hpp"
#include "gegen/harness/search.hpp"
#include "gegen/recon/recon.hpp"

namespace gegen::harness {

enum class Method { gegen, chebnet, gcn, tgsr, graphtrss, mean_impute };
std::string_view method_name(Method m);
Method parse_method(std::string_view name);
// Methods whose output does not depend on a seed.
bool is_deterministic(Method m);

struct DatasetSection {
  std::optional<std::filesystem::path> signal;
  std::optional<std::filesystem::path> coords;
  std::string name;
  SynthConfig synth{};  // used when signal is absent
};

enum class GraphSource { knn, edges, learn };

struct GraphSection {
  GraphSource source = GraphSource::knn;
  std::size_t k = 5;
  std::optional<double> sigma;
  std::optional<std::filesystem::path> edges;
  std::optional<graphs::GraphLearnConfig> learn;
};

struct LossSection {
  // Convex baseline settings; the GNN loss lives in Hyperparams.
  double convex_lambda = 1.0;
  double convex_epsilon = 0.05;
  double cg_tolerance = 1e-8;
  std::size_t cg_max_iterations = 10000;
};

struct SearchSection {
  bool enabled = false;
  SearchSpace space{};
  CvConfig cv{};
};

struct ReportSection {
  std::vector<Method> methods{Method::gegen, Method::chebnet, Method::gcn, Method::tgsr, Method::graphtrss,
                              Method::mean_impute};
  std::vector<double> densities{0.5};
  std::size_t repetitions = 1;
  std::filesystem::path output_dir = "report";
  bool reconstructions = true;
  bool plot = true;
  std::size_t threads = 0;
};

struct ExperimentConfig {
  std::optional<std::string> preset;
  std::uint64_t seed = 0;
  DatasetSection dataset{};
  GraphSection graph{};
  Hyperparams model{};
  LossSection loss{};
  SearchSection search{};
  ReportSection report{};

  void validate() const;
};

// Sections: dataset, graph, model, loss, search, report, plus top-level
// preset and seed. Unknown keys throw ConfigError. Relative paths resolve
// against base_dir.
ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// The model section: ModelConfig keys plus learning_rate, weight_decay,
// epochs, lambda and epsilon.
nlohmann::json to_json(const Hyperparams& h);
Hyperparams hyperparams_from_json(const nlohmann::json& j, Hyperparams base);

// Applies the named preset to the GNN hyperparameters.
Hyperparams apply_preset(std::string_view preset, Hyperparams h);

struct PreparedData {
  Dataset dataset;
  graphs::Graph graph;
  graphs::LaplacianBundle bundle;
};
PreparedData prepare_data(const ExperimentConfig& cfg);

struct MetricRow {
  Method method;
  double density = 0.0;
  std::uint64_t seed = 0;
  std::optional<Metrics> metrics;  // absent when the cell failed
  std::string error;
};

struct ReportBundle {
  std::vector<MetricRow> rows;
  std::filesystem::path metrics_csv;
  std::vector<std::filesystem::path> reconstructions;
  std::optional<std::filesystem::path> plot;
};

// GNN hyperparameters used for method m: chebnet pins alpha to 0 and gcn
// switches the convolution kind.
Hyperparams method_hyperparams(Method m, Hyperparams base);
SearchSpace method_search_space(Method m, SearchSpace space);

// Reconstruction of one method on one mask. Seed drives GNN initialisation
// and dropout only.
DenseMatrix reconstruct(Method m, const PreparedData& data, const SamplingMask& mask,
                        const Hyperparams& h, const LossSection& loss, std::uint64_t seed);

ReportBundle run_experiment(const ExperimentConfig& cfg);

void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricRow> rows);
// Median RMSE per method against density.
void write_rmse_plot(const std::filesystem::path& path, std::span<const MetricRow> rows);

}  // namespace gegen::harness
