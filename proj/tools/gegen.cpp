// Command-line front end: synthetic data, graph learning, single
// reconstructions, training, hyperparameter search and full reports.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gegen/graphs/learn.hpp"
#include "gegen/harness/experiment.hpp"
#include "gegen/io/csv.hpp"
#include "gegen/model/gegen_gnn.hpp"
#include "gegen/num/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gegen;

namespace {

struct CommonOptions {
  std::string config;
  std::string signal;
  std::string coords;
  std::string edges;
  std::string mask;
  std::vector<double> densities;
  std::optional<std::uint64_t> seed;
  std::string preset;
  std::string out;
  std::string method;
  std::optional<std::size_t> epochs;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_method) {
  cmd->add_option("-c,--config", o.config, "Experiment JSON config")->check(CLI::ExistingFile);
  cmd->add_option("--signal", o.signal, "Signal CSV (N rows x M columns)")->check(CLI::ExistingFile);
  cmd->add_option("--coords", o.coords, "Node coordinates CSV")->check(CLI::ExistingFile);
  cmd->add_option("--edges", o.edges, "Edge list CSV (i,j,weight)")->check(CLI::ExistingFile);
  cmd->add_option("--densities", o.densities, "Sampling densities in (0, 1)");
  cmd->add_option("--seed", o.seed, "Experiment seed");
  cmd->add_option("--preset", o.preset, "Hyperparameter preset (appendix-d)");
  cmd->add_option("--epochs", o.epochs, "Training epochs for GNN methods");
  cmd->add_option("-o,--out", o.out, "Output directory");
  if (with_method) {
    cmd->add_option("--mask", o.mask, "0/1 mask CSV; overrides --densities")->check(CLI::ExistingFile);
    cmd->add_option("-m,--method", o.method, "gegen, chebnet, gcn, tgsr, graphtrss or mean-impute");
  }
}

std::string absolute(const std::string& p) { return fs::absolute(p).string(); }

harness::ExperimentConfig build_config(const CommonOptions& o) {
  json j = json::object();
  fs::path base;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError(o.config + ": " + e.what());
    }
    base = fs::absolute(o.config).parent_path();
  }
  if (!o.preset.empty()) j["preset"] = o.preset;
  if (o.seed) j["seed"] = *o.seed;
  if (!o.signal.empty()) j["dataset"]["signal"] = absolute(o.signal);
  if (!o.coords.empty()) j["dataset"]["coords"] = absolute(o.coords);
  if (!o.edges.empty()) {
    j["graph"]["source"] = "edges";
    j["graph"]["edges"] = absolute(o.edges);
  }
  if (!o.densities.empty()) j["report"]["densities"] = o.densities;
  if (!o.out.empty()) j["report"]["output_dir"] = absolute(o.out);
  if (!o.method.empty()) j["report"]["methods"] = std::vector<std::string>{o.method};
  if (o.epochs) j["model"]["epochs"] = *o.epochs;
  return harness::parse_experiment_config(j, base);
}

harness::SamplingMask single_mask(const CommonOptions& o, const harness::ExperimentConfig& cfg,
                                  const harness::PreparedData& data) {
  if (!o.mask.empty()) {
    auto mask = harness::read_mask(o.mask);
    if (mask.j.rows() != data.dataset.nodes() || mask.j.cols() != data.dataset.steps()) {
      throw ShapeError("mask shape does not match the dataset");
    }
    return mask;
  }
  // Same stream as the first density of a report run.
  return harness::make_mask(data.dataset.nodes(), data.dataset.steps(), cfg.report.densities.front(),
                            num::Rng(cfg.seed).split(100).next_u64());
}

void print_metrics(const std::string& label, const harness::Metrics& m) {
  std::cout << label << ": rmse=" << io::format_double(m.rmse) << " mae=" << io::format_double(m.mae)
            << " mape=" << (m.mape ? io::format_double(*m.mape) : std::string("n/a")) << '\n';
}

int run_synth(const harness::SynthConfig& sc, const std::string& out) {
  const auto res = harness::synth_dataset(sc);
  const fs::path dir(out);
  io::write_matrix_csv(dir / "signal.csv", res.dataset.signal);
  io::write_matrix_csv(dir / "coords.csv", *res.dataset.coords);
  graphs::write_edge_list(dir / "edges.csv", res.graph);
  std::cout << "wrote " << res.dataset.nodes() << "x" << res.dataset.steps() << " signal and "
            << res.graph.edge_count() << " edges to " << dir.string() << '\n';
  return 0;
}

int run_learn_graph(const std::string& signal, const graphs::GraphLearnConfig& lc, const std::string& out) {
  const auto x = io::read_matrix_csv(signal);
  const auto learned = graphs::learn_graph(x.transposed(), lc);
  graphs::write_edge_list(out, learned.graph);
  std::cout << "learned " << learned.graph.edge_count() << " edges in " << learned.iterations << " iterations"
            << (learned.converged ? "" : " (not converged)") << "; wrote " << out << '\n';
  return 0;
}

int run_reconstruct(const CommonOptions& o) {
  const auto cfg = build_config(o);
  const auto data = harness::prepare_data(cfg);
  const auto mask = single_mask(o, cfg, data);
  const harness::Method m = cfg.report.methods.front();
  const auto h = harness::is_deterministic(m) ? cfg.model : harness::method_hyperparams(m, cfg.model);
  const auto xhat = harness::reconstruct(m, data, mask, h, cfg.loss, cfg.seed);
  const fs::path dir = cfg.report.output_dir;
  io::write_matrix_csv(dir / "reconstruction.csv", xhat);
  io::write_matrix_csv(dir / "mask.csv", mask.j);
  print_metrics(std::string(harness::method_name(m)), harness::compute_metrics(xhat, data.dataset.signal,
                                                                               mask.unsampled()));
  return 0;
}

int run_train(const CommonOptions& o) {
  const auto cfg = build_config(o);
  const auto data = harness::prepare_data(cfg);
  const auto mask = single_mask(o, cfg, data);
  const harness::Method m = o.method.empty() ? harness::Method::gegen : cfg.report.methods.front();
  if (harness::is_deterministic(m)) throw ConfigError("train expects gegen, chebnet or gcn");
  const auto h = harness::method_hyperparams(m, cfg.model);
  const auto y = num::hadamard(mask.j, data.dataset.signal);
  const auto sampled = mask.sampled();
  const auto fit = harness::fit_gnn(h, y, data.bundle, sampled, {}, cfg.seed);
  const auto xhat = fit.model.predict(data.bundle, recon::model_input(y, sampled));
  const fs::path dir = cfg.report.output_dir;
  recon::write_trace_csv(dir / "trace.csv", fit.trace);
  model::save_checkpoint(dir / "model.csv", fit.model);
  io::write_matrix_csv(dir / "reconstruction.csv", xhat);
  io::write_matrix_csv(dir / "mask.csv", mask.j);
  print_metrics(std::string(harness::method_name(m)), harness::compute_metrics(xhat, data.dataset.signal,
                                                                               mask.unsampled()));
  return 0;
}

int run_search(const CommonOptions& o) {
  const auto cfg = build_config(o);
  const auto data = harness::prepare_data(cfg);
  const auto mask = single_mask(o, cfg, data);
  const harness::Method m = o.method.empty() ? harness::Method::gegen : cfg.report.methods.front();
  if (harness::is_deterministic(m)) throw ConfigError("search expects gegen, chebnet or gcn");
  const auto res = harness::monte_carlo_cv(num::hadamard(mask.j, data.dataset.signal), data.bundle,
                                           mask.sampled(), harness::method_search_space(m, cfg.search.space),
                                           harness::method_hyperparams(m, cfg.model), cfg.search.cv);
  const fs::path dir = cfg.report.output_dir;
  harness::write_trial_table(dir / "trials.csv", res);
  auto out = io::open_output(dir / "best.json");
  out << harness::to_json(res.best_config()).dump(2) << '\n';
  std::cout << "best trial " << res.best << " median validation rmse "
            << io::format_double(res.median_val_rmse[res.best]) << "; wrote " << (dir / "best.json").string()
            << '\n';
  return 0;
}

int run_report(const CommonOptions& o) {
  const auto cfg = build_config(o);
  const auto bundle = harness::run_experiment(cfg);
  std::size_t failed = 0;
  for (const auto& r : bundle.rows) failed += r.metrics ? 0 : 1;
  std::cout << "wrote " << bundle.rows.size() << " rows to " << bundle.metrics_csv.string();
  if (failed) std::cout << " (" << failed << " failed)";
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-varying graph signal reconstruction with Gegenbauer graph networks"};
  app.require_subcommand(1);

  harness::SynthConfig sc;
  std::string synth_out = "synth";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset and graph");
  synth->add_option("--nodes", sc.nodes, "Number of nodes")->capture_default_str();
  synth->add_option("--steps", sc.steps, "Number of time steps")->capture_default_str();
  synth->add_option("--bandwidth", sc.bandwidth, "GFT bandwidth")->capture_default_str();
  synth->add_option("--cycles", sc.temporal_cycles, "Coefficient oscillations over the horizon")
      ->capture_default_str();
  synth->add_option("--noise", sc.noise, "Gaussian noise level")->capture_default_str();
  synth->add_option("--knn", sc.knn, "Neighbours per node")->capture_default_str();
  synth->add_option("--offset", sc.offset, "Constant level")->capture_default_str();
  synth->add_option("--seed", sc.seed, "Generator seed")->capture_default_str();
  synth->add_option("-o,--out", synth_out, "Output directory")->capture_default_str();

  std::string learn_signal;
  std::string learn_out = "edges.csv";
  graphs::GraphLearnConfig lc;
  auto* learn = app.add_subcommand("learn-graph", "Learn a graph from a signal CSV");
  learn->add_option("--signal", learn_signal, "Signal CSV (N rows x M columns)")
      ->required()
      ->check(CLI::ExistingFile);
  learn->add_option("--gamma", lc.gamma, "Sparsity weight")->required();
  learn->add_option("--beta", lc.beta, "Filter shift")->required();
  learn->add_option("--max-iterations", lc.max_iterations, "Iteration budget")->capture_default_str();
  learn->add_option("-o,--out", learn_out, "Edge list output")->capture_default_str();

  CommonOptions rec_opts, train_opts, search_opts, report_opts;
  auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct one masked signal with one method");
  add_common(reconstruct, rec_opts, true);
  auto* train = app.add_subcommand("train", "Train a GNN on one masked signal");
  add_common(train, train_opts, true);
  auto* search = app.add_subcommand("search", "Monte Carlo cross-validated hyperparameter search");
  add_common(search, search_opts, true);
  auto* report = app.add_subcommand("report", "Run every method and density and write a report");
  add_common(report, report_opts, false);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*synth) return run_synth(sc, synth_out);
    if (*learn) return run_learn_graph(learn_signal, lc, learn_out);
    if (*reconstruct) return run_reconstruct(rec_opts);
    if (*train) return run_train(train_opts);
    if (*search) return run_search(search_opts);
    if (*report) return run_report(report_opts);
  } catch (const gegen::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
