#include "gegen/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "gegen/io/csv.hpp"
#include "gegen/log.hpp"
#include "gegen/model/config_json.hpp"
#include "gegen/num/errors.hpp"

namespace gegen::harness {

using nlohmann::json;

namespace {

constexpr Method kAllMethods[] = {Method::gegen, Method::chebnet, Method::gcn,
                                  Method::tgsr,  Method::graphtrss, Method::mean_impute};

template <typename T>
T get_as(const json& value, const std::string& where) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
}

[[noreturn]] void unknown_key(const std::string& section, const std::string& key) {
  throw ConfigError("unknown key '" + key + "' in " + section);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

IntRange int_range(const json& v, const std::string& where) {
  if (v.is_number_integer()) {
    const auto x = get_as<std::int64_t>(v, where);
    return {x, x};
  }
  const auto pair = get_as<std::vector<std::int64_t>>(v, where);
  if (pair.size() != 2) throw ConfigError(where + ": expected [lo, hi]");
  return {pair[0], pair[1]};
}

RealRange real_range(const json& v, const std::string& where) {
  if (v.is_number()) {
    const auto x = get_as<double>(v, where);
    return {x, x};
  }
  const auto pair = get_as<std::vector<double>>(v, where);
  if (pair.size() != 2) throw ConfigError(where + ": expected [lo, hi]");
  return {pair[0], pair[1]};
}

SearchSpace parse_space(const json& j) {
  require_object(j, "search.space");
  SearchSpace s;
  for (const auto& [key, v] : j.items()) {
    const std::string where = "search.space." + key;
    if (key == "conv_layers") s.conv_layers = int_range(v, where);
    else if (key == "conv_hidden") s.conv_hidden = int_range(v, where);
    else if (key == "linear_layers") s.linear_layers = int_range(v, where);
    else if (key == "linear_hidden") s.linear_hidden = int_range(v, where);
    else if (key == "zeta") s.zeta = int_range(v, where);
    else if (key == "learning_rate") s.learning_rate = real_range(v, where);
    else if (key == "dropout") s.dropout = real_range(v, where);
    else if (key == "lambda") s.lambda = real_range(v, where);
    else if (key == "epsilon") s.epsilon = real_range(v, where);
    else if (key == "alpha") s.alpha = real_range(v, where);
    else unknown_key("search.space", key);
  }
  return s;
}

SynthConfig parse_synth(const json& j) {
  require_object(j, "dataset.synth");
  SynthConfig s;
  for (const auto& [key, v] : j.items()) {
    const std::string where = "dataset.synth." + key;
    if (key == "nodes") s.nodes = get_as<std::size_t>(v, where);
    else if (key == "steps") s.steps = get_as<std::size_t>(v, where);
    else if (key == "bandwidth") s.bandwidth = get_as<std::size_t>(v, where);
    else if (key == "temporal_cycles") s.temporal_cycles = get_as<double>(v, where);
    else if (key == "noise") s.noise = get_as<double>(v, where);
    else if (key == "knn") s.knn = get_as<std::size_t>(v, where);
    else if (key == "offset") s.offset = get_as<double>(v, where);
    else if (key == "seed") s.seed = get_as<std::uint64_t>(v, where);
    else unknown_key("dataset.synth", key);
  }
  return s;
}

std::string density_tag(double d) { return io::format_double(d); }

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::gegen: return "gegen";
    case Method::chebnet: return "chebnet";
    case Method::gcn: return "gcn";
    case Method::tgsr: return "tgsr";
    case Method::graphtrss: return "graphtrss";
    case Method::mean_impute: return "mean-impute";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (method_name(m) == name) return m;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

bool is_deterministic(Method m) {
  return m == Method::tgsr || m == Method::graphtrss || m == Method::mean_impute;
}

json to_json(const Hyperparams& h) {
  json j = model::to_json(h.model);
  j["learning_rate"] = h.learning_rate;
  j["weight_decay"] = h.weight_decay;
  j["epochs"] = h.epochs;
  j["lambda"] = h.loss.lambda;
  j["epsilon"] = h.loss.epsilon;
  return j;
}

Hyperparams hyperparams_from_json(const json& j, Hyperparams h) {
  require_object(j, "model");
  json model_keys = json::object();
  for (const auto& [key, v] : j.items()) {
    const std::string where = "model." + key;
    if (key == "learning_rate") h.learning_rate = get_as<double>(v, where);
    else if (key == "weight_decay") h.weight_decay = get_as<double>(v, where);
    else if (key == "epochs") h.epochs = get_as<std::size_t>(v, where);
    else if (key == "lambda") h.loss.lambda = get_as<double>(v, where);
    else if (key == "epsilon") h.loss.epsilon = get_as<double>(v, where);
    else model_keys[key] = v;
  }
  h.model = model::model_config_from_json(model_keys, h.model);
  try {
    h.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return h;
}

Hyperparams apply_preset(std::string_view preset, Hyperparams h) {
  if (preset == "appendix-d") {
    const std::size_t epochs = h.epochs;
    h = appendix_d_preset();
    h.epochs = epochs;
    return h;
  }
  throw ConfigError("unknown preset '" + std::string(preset) + "'");
}

void ExperimentConfig::validate() const {
  model.validate();
  search.space.validate();
  search.cv.validate();
  if (report.methods.empty()) throw ConfigError("report.methods is empty");
  if (report.densities.empty()) throw ConfigError("report.densities is empty");
  for (double d : report.densities)
    if (!(d > 0.0 && d < 1.0)) throw ConfigError("report.densities must lie in (0, 1)");
  if (report.repetitions < 1) throw ConfigError("report.repetitions must be >= 1");
  if (!dataset.signal) dataset.synth.validate();
  if (dataset.coords && !dataset.signal) throw ConfigError("dataset.coords given without dataset.signal");
  switch (graph.source) {
    case GraphSource::knn:
      if (dataset.signal) {
        if (!dataset.coords) throw ConfigError("graph.source knn needs dataset.coords");
        if (!graph.sigma) throw ConfigError("graph.source knn on a loaded dataset needs graph.sigma");
      }
      break;
    case GraphSource::edges:
      if (!graph.edges) throw ConfigError("graph.source edges needs graph.edges");
      break;
    case GraphSource::learn:
      if (!graph.learn) throw ConfigError("graph.source learn needs graph.gamma and graph.beta");
      break;
  }
  recon::ConvexSpec spec{recon::ConvexVariant::graphtrss, loss.convex_lambda, loss.convex_epsilon,
                         loss.cg_tolerance, loss.cg_max_iterations, true};
  try {
    spec.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_experiment_config(const json& j, const std::filesystem::path& base_dir) {
  require_object(j, "experiment config");
  ExperimentConfig cfg;
  if (j.contains("preset")) {
    cfg.preset = get_as<std::string>(j.at("preset"), "preset");
    cfg.model = apply_preset(*cfg.preset, cfg.model);
  }
  std::optional<double> gamma, beta;
  for (const auto& [section, body] : j.items()) {
    if (section == "preset") continue;
    if (section == "seed") {
      cfg.seed = get_as<std::uint64_t>(body, "seed");
      continue;
    }
    if (section == "model") {
      cfg.model = hyperparams_from_json(body, cfg.model);
      continue;
    }
    if (section != "dataset" && section != "graph" && section != "loss" && section != "search" &&
        section != "report") {
      throw ConfigError("unknown section '" + section + "'");
    }
    require_object(body, section);
    for (const auto& [key, v] : body.items()) {
      const std::string where = section + "." + key;
      if (section == "dataset") {
        if (key == "signal") cfg.dataset.signal = resolve(base_dir, get_as<std::string>(v, where));
        else if (key == "coords") cfg.dataset.coords = resolve(base_dir, get_as<std::string>(v, where));
        else if (key == "name") cfg.dataset.name = get_as<std::string>(v, where);
        else if (key == "synth") cfg.dataset.synth = parse_synth(v);
        else unknown_key(section, key);
      } else if (section == "graph") {
        if (key == "source") {
          const auto s = get_as<std::string>(v, where);
          if (s == "knn") cfg.graph.source = GraphSource::knn;
          else if (s == "edges") cfg.graph.source = GraphSource::edges;
          else if (s == "learn") cfg.graph.source = GraphSource::learn;
          else throw ConfigError("graph.source must be knn, edges or learn");
        } else if (key == "k") cfg.graph.k = get_as<std::size_t>(v, where);
        else if (key == "sigma") cfg.graph.sigma = get_as<double>(v, where);
        else if (key == "edges") cfg.graph.edges = resolve(base_dir, get_as<std::string>(v, where));
        else if (key == "gamma") gamma = get_as<double>(v, where);
        else if (key == "beta") beta = get_as<double>(v, where);
        else unknown_key(section, key);
      } else if (section == "loss") {
        if (key == "lambda") cfg.model.loss.lambda = get_as<double>(v, where);
        else if (key == "epsilon") cfg.model.loss.epsilon = get_as<double>(v, where);
        else if (key == "convex_lambda") cfg.loss.convex_lambda = get_as<double>(v, where);
        else if (key == "convex_epsilon") cfg.loss.convex_epsilon = get_as<double>(v, where);
        else if (key == "cg_tolerance") cfg.loss.cg_tolerance = get_as<double>(v, where);
        else if (key == "cg_max_iterations") cfg.loss.cg_max_iterations = get_as<std::size_t>(v, where);
        else unknown_key(section, key);
      } else if (section == "search") {
        if (key == "enabled") cfg.search.enabled = get_as<bool>(v, where);
        else if (key == "trials") cfg.search.cv.trials = get_as<std::size_t>(v, where);
        else if (key == "folds") cfg.search.cv.folds = get_as<std::size_t>(v, where);
        else if (key == "train_fraction") cfg.search.cv.train_fraction = get_as<double>(v, where);
        else if (key == "space") cfg.search.space = parse_space(v);
        else unknown_key(section, key);
      } else if (section == "report") {
        if (key == "methods") {
          cfg.report.methods.clear();
          for (const auto& name : get_as<std::vector<std::string>>(v, where))
            cfg.report.methods.push_back(parse_method(name));
        } else if (key == "densities") cfg.report.densities = get_as<std::vector<double>>(v, where);
        else if (key == "repetitions") cfg.report.repetitions = get_as<std::size_t>(v, where);
        else if (key == "output_dir") cfg.report.output_dir = resolve(base_dir, get_as<std::string>(v, where));
        else if (key == "reconstructions") cfg.report.reconstructions = get_as<bool>(v, where);
        else if (key == "plot") cfg.report.plot = get_as<bool>(v, where);
        else if (key == "threads") cfg.report.threads = get_as<std::size_t>(v, where);
        else unknown_key(section, key);
      } else {
        throw ConfigError("unknown section '" + section + "'");
      }
    }
  }
  if (gamma || beta) {
    if (!gamma || !beta) throw ConfigError("graph.gamma and graph.beta must be given together");
    graphs::GraphLearnConfig lc;
    lc.gamma = *gamma;
    lc.beta = *beta;
    cfg.graph.learn = lc;
  }
  cfg.search.cv.seed = cfg.seed;
  cfg.search.cv.threads = cfg.report.threads;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_experiment_config(j, path.parent_path());
}

PreparedData prepare_data(const ExperimentConfig& cfg) {
  std::optional<Dataset> dataset;
  std::optional<graphs::Graph> graph;
  if (cfg.dataset.signal) {
    dataset = load_dataset(*cfg.dataset.signal, cfg.dataset.coords, cfg.dataset.name);
  } else {
    auto synth = synth_dataset(cfg.dataset.synth);
    dataset = std::move(synth.dataset);
    if (!cfg.dataset.name.empty()) dataset->name = cfg.dataset.name;
    if (cfg.graph.source == GraphSource::knn) graph = std::move(synth.graph);
  }
  if (!graph) {
    switch (cfg.graph.source) {
      case GraphSource::knn:
        graph = graphs::knn_gaussian_graph(*dataset->coords, cfg.graph.k, cfg.graph.sigma);
        break;
      case GraphSource::edges:
        graph = graphs::read_edge_list(*cfg.graph.edges, dataset->nodes());
        break;
      case GraphSource::learn:
        graph = graphs::learn_graph(dataset->signal.transposed(), *cfg.graph.learn).graph;
        break;
    }
  }
  if (graph->nodes != dataset->nodes()) {
    throw ConfigError("graph has " + std::to_string(graph->nodes) + " nodes but dataset has " +
                      std::to_string(dataset->nodes()));
  }
  auto bundle = graphs::laplacian_bundle(*graph);
  return {std::move(*dataset), std::move(*graph), std::move(bundle)};
}

Hyperparams method_hyperparams(Method m, Hyperparams h) {
  switch (m) {
    case Method::chebnet:
      h.model.kind = model::ConvKind::gegen;
      h.model.alpha = 0.0;
      break;
    case Method::gcn:
      h.model.kind = model::ConvKind::gcn;
      break;
    case Method::gegen:
      h.model.kind = model::ConvKind::gegen;
      break;
    default:
      throw ContractError("method_hyperparams: " + std::string(method_name(m)) + " is not a GNN method");
  }
  return h;
}

SearchSpace method_search_space(Method m, SearchSpace space) {
  if (m == Method::chebnet) space.alpha = {0.0, 0.0};
  return space;
}

DenseMatrix reconstruct(Method m, const PreparedData& data, const SamplingMask& mask, const Hyperparams& h,
                        const LossSection& loss, std::uint64_t seed) {
  const DenseMatrix y = num::hadamard(mask.j, data.dataset.signal);
  switch (m) {
    case Method::mean_impute:
      return recon::mean_impute(y, mask.j);
    case Method::tgsr:
    case Method::graphtrss: {
      recon::ConvexSpec spec;
      spec.variant = m == Method::tgsr ? recon::ConvexVariant::tgsr : recon::ConvexVariant::graphtrss;
      spec.lambda = loss.convex_lambda;
      spec.epsilon = loss.convex_epsilon;
      spec.tolerance = loss.cg_tolerance;
      spec.max_iterations = loss.cg_max_iterations;
      return recon::convex_reconstruct(y, mask.j, data.bundle, spec).x;
    }
    default: {
      const auto sampled = mask.sampled();
      auto fit = fit_gnn(method_hyperparams(m, h), y, data.bundle, sampled, {}, seed);
      DenseMatrix xhat = fit.model.predict(data.bundle, recon::model_input(y, sampled));
      if (!xhat.all_finite()) throw OptimizerError(std::string(method_name(m)) + ": reconstruction is not finite");
      return xhat;
    }
  }
}

ReportBundle run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const PreparedData data = prepare_data(cfg);
  const num::Rng root(cfg.seed);
  const auto& rep = cfg.report;

  std::vector<SamplingMask> masks;
  for (std::size_t d = 0; d < rep.densities.size(); ++d) {
    masks.push_back(make_mask(data.dataset.nodes(), data.dataset.steps(), rep.densities[d],
                              root.split(100 + d).next_u64()));
  }
  std::vector<std::uint64_t> rep_seeds;
  for (std::size_t r = 0; r < rep.repetitions; ++r) rep_seeds.push_back(root.split(200 + r).next_u64());

  // Hyperparameters per (density, method) after optional search.
  std::map<std::pair<std::size_t, std::size_t>, Hyperparams> chosen;
  for (std::size_t d = 0; d < masks.size(); ++d) {
    const auto dev = masks[d].sampled();
    for (std::size_t mi = 0; mi < rep.methods.size(); ++mi) {
      const Method m = rep.methods[mi];
      if (is_deterministic(m)) continue;
      Hyperparams h = method_hyperparams(m, cfg.model);
      if (cfg.search.enabled) {
        CvConfig cv = cfg.search.cv;
        cv.seed = root.split(300 + d).next_u64();
        try {
          const DenseMatrix observed = num::hadamard(masks[d].j, data.dataset.signal);
          auto res = monte_carlo_cv(observed, data.bundle, dev, method_search_space(m, cfg.search.space), h, cv);
          write_trial_table(rep.output_dir / "search" /
                                (std::string(method_name(m)) + "_m" + density_tag(rep.densities[d]) + ".csv"),
                            res);
          h = res.best_config();
        } catch (const Error& e) {
          warn("search for " + std::string(method_name(m)) + " at density " + density_tag(rep.densities[d]) +
               " failed: " + e.what());
        }
      }
      chosen.emplace(std::pair{d, mi}, h);
    }
  }

  struct Cell {
    std::size_t density;
    std::size_t method;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < masks.size(); ++d)
    for (std::size_t mi = 0; mi < rep.methods.size(); ++mi) {
      if (is_deterministic(rep.methods[mi])) cells.push_back({d, mi, cfg.seed});
      else
        for (std::uint64_t s : rep_seeds) cells.push_back({d, mi, s});
    }

  ReportBundle out;
  out.rows.resize(cells.size());
  std::vector<std::optional<DenseMatrix>> recons(cells.size());
  parallel_for(cells.size(), rep.threads, [&](std::size_t c) {
    const Cell& cell = cells[c];
    const Method m = rep.methods[cell.method];
    MetricRow row{m, rep.densities[cell.density], cell.seed, std::nullopt, {}};
    try {
      const SamplingMask& mask = masks[cell.density];
      const auto it = chosen.find({cell.density, cell.method});
      const Hyperparams& h = it != chosen.end() ? it->second : cfg.model;
      DenseMatrix xhat = reconstruct(m, data, mask, h, cfg.loss, cell.seed);
      row.metrics = compute_metrics(xhat, data.dataset.signal, mask.unsampled());
      recons[c] = std::move(xhat);
    } catch (const std::exception& e) {
      row.error = e.what();
      warn(std::string(method_name(m)) + " at density " + density_tag(row.density) + " failed: " + e.what());
    }
    out.rows[c] = std::move(row);
  });

  out.metrics_csv = rep.output_dir / "metrics.csv";
  write_metrics_csv(out.metrics_csv, out.rows);
  if (rep.reconstructions) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!recons[c]) continue;
      const auto& row = out.rows[c];
      auto path = rep.output_dir / "reconstructions" /
                  (std::string(method_name(row.method)) + "_m" + density_tag(row.density) + "_s" +
                   std::to_string(row.seed) + ".csv");
      io::write_matrix_csv(path, *recons[c]);
      out.reconstructions.push_back(std::move(path));
    }
  }
  if (rep.plot) {
    out.plot = rep.output_dir / "rmse_vs_density.svg";
    write_rmse_plot(*out.plot, out.rows);
  }
  return out;
}

void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricRow> rows) {
  auto out = io::open_output(path);
  out << "method,density,seed,rmse,mae,mape\n";
  for (const auto& r : rows) {
    out << method_name(r.method) << ',' << io::format_double(r.density) << ',' << r.seed << ',';
    if (r.metrics) {
      out << io::format_double(r.metrics->rmse) << ',' << io::format_double(r.metrics->mae) << ',';
      if (r.metrics->mape) out << io::format_double(*r.metrics->mape);
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

constexpr const char* kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"};

}  // namespace

void write_rmse_plot(const std::filesystem::path& path, std::span<const MetricRow> rows) {
  // method -> density -> rmse values
  std::vector<std::string> order;
  std::map<std::string, std::map<double, std::vector<double>>> series;
  for (const auto& r : rows) {
    if (!r.metrics) continue;
    const std::string name(method_name(r.method));
    if (!series.count(name)) order.push_back(name);
    series[name][r.density].push_back(r.metrics->rmse);
  }
  double xmin = 1.0, xmax = 0.0, ymax = 0.0;
  std::map<std::string, std::vector<std::pair<double, double>>> points;
  for (const auto& name : order) {
    for (auto& [d, vals] : series[name]) {
      std::sort(vals.begin(), vals.end());
      const std::size_t n = vals.size();
      const double med = n % 2 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
      points[name].emplace_back(d, med);
      xmin = std::min(xmin, d);
      xmax = std::max(xmax, d);
      ymax = std::max(ymax, med);
    }
  }
  if (xmax <= xmin) {
    xmin -= 0.05;
    xmax += 0.05;
  }
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.1;

  const double w = 640, h = 400, left = 60, right = 150, top = 20, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + ph - y / ymax * ph; };

  auto out = io::open_output(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4.0;
    const double yv = ymax * t / 4.0;
    out << "<text x=\"" << fixed2(sx(xv)) << "\" y=\"" << fixed2(top + ph + 18)
        << "\" text-anchor=\"middle\">" << fixed2(xv) << "</text>\n";
    out << "<text x=\"" << fixed2(left - 6) << "\" y=\"" << fixed2(sy(yv) + 4) << "\" text-anchor=\"end\">"
        << fixed2(yv) << "</text>\n";
  }
  out << "<text x=\"" << fixed2(left + pw / 2) << "\" y=\"" << fixed2(h - 10)
      << "\" text-anchor=\"middle\">sampling density</text>\n";
  out << "<text x=\"15\" y=\"" << fixed2(top + ph / 2) << "\" transform=\"rotate(-90 15 " << fixed2(top + ph / 2)
      << ")\" text-anchor=\"middle\">RMSE</text>\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    const auto& pts = points[order[i]];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t p = 0; p < pts.size(); ++p) {
      out << (p ? " " : "") << fixed2(sx(pts[p].first)) << ',' << fixed2(sy(pts[p].second));
    }
    out << "\"/>\n";
    for (const auto& [x, y] : pts) {
      out << "<circle cx=\"" << fixed2(sx(x)) << "\" cy=\"" << fixed2(sy(y)) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    const double ly = top + 10 + 18.0 * static_cast<double>(i);
    out << "<line x1=\"" << fixed2(left + pw + 15) << "\" y1=\"" << fixed2(ly) << "\" x2=\""
        << fixed2(left + pw + 35) << "\" y2=\"" << fixed2(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fixed2(left + pw + 40) << "\" y=\"" << fixed2(ly + 4) << "\">" << order[i]
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace gegen::harness
