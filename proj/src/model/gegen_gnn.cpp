#include "gegen/model/gegen_gnn.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "gegen/io/csv.hpp"
#include "gegen/model/config_json.hpp"
#include "gegen/num/errors.hpp"
#include "gegen/poly/basis.hpp"

namespace gegen::model {

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::identity: return "identity";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  for (Activation a : {Activation::relu, Activation::tanh, Activation::identity})
    if (activation_name(a) == name) return a;
  throw ParameterError("unknown activation '" + std::string(name) + "'");
}

std::string_view conv_kind_name(ConvKind k) { return k == ConvKind::gegen ? "gegen" : "gcn"; }

ConvKind parse_conv_kind(std::string_view name) {
  if (name == "gegen") return ConvKind::gegen;
  if (name == "gcn") return ConvKind::gcn;
  throw ParameterError("unknown convolution kind '" + std::string(name) + "'");
}

void ModelConfig::validate() const {
  if (conv_layers < 1) throw ParameterError("ModelConfig: need at least one convolutional layer");
  if (conv_hidden < 1) throw ParameterError("ModelConfig: conv_hidden must be >= 1");
  if (linear_layers > 0 && linear_hidden < 1) throw ParameterError("ModelConfig: linear_hidden must be >= 1");
  if (zeta < 1) throw ParameterError("ModelConfig: zeta must be >= 1");
  if (!(alpha > -0.5)) throw DomainError("ModelConfig: alpha must exceed -1/2");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ParameterError("ModelConfig: dropout must lie in [0, 1)");
}

Var gegenconv_forward(Var theta, Var weight, std::span<const Var> basis) {
  const std::size_t terms = theta.value().cols();
  if (theta.value().rows() != 1 || terms == 0) throw ShapeError("gegenconv_forward: theta must be 1 x zeta");
  if (basis.size() < terms) {
    throw ContractError("gegenconv_forward: basis depth " + std::to_string(basis.size()) +
                        " is smaller than filter order " + std::to_string(terms));
  }
  // (sum_k theta_k B_k) W == sum_k theta_k (B_k W)
  Var filtered = num::scale_by_entry(theta, 0, basis[0]);
  for (std::size_t k = 1; k < terms; ++k) {
    filtered = num::add(filtered, num::scale_by_entry(theta, k, basis[k]));
  }
  return num::matmul(filtered, weight);
}

Var cascade_forward(std::span<const Var> thetas, std::span<const Var> weights, Var mu,
                    std::span<const Var> basis) {
  if (thetas.size() != weights.size() || mu.value().cols() != thetas.size()) {
    throw ShapeError("cascade_forward: branch count mismatch");
  }
  Var out = num::scale_by_entry(mu, 0, gegenconv_forward(thetas[0], weights[0], basis));
  for (std::size_t rho = 1; rho < thetas.size(); ++rho) {
    out = num::add(out, num::scale_by_entry(mu, rho, gegenconv_forward(thetas[rho], weights[rho], basis)));
  }
  return out;
}

namespace {

DenseMatrix uniform_fan_in(std::size_t in, std::size_t out, num::Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  DenseMatrix w(in, out);
  for (double& v : w.data()) v = rng.uniform(-bound, bound);
  return w;
}

}  // namespace

GegenGnn::GegenGnn(ModelConfig config, std::size_t input_width, std::size_t output_width,
                   std::uint64_t init_seed)
    : config_(config), input_width_(input_width), output_width_(output_width) {
  config_.validate();
  if (input_width < 1 || output_width < 1) throw ShapeError("GegenGnn: widths must be >= 1");
  num::Rng rng(init_seed);
  const double init_coeff = 1.0 / static_cast<double>(config_.zeta);
  std::size_t width = input_width;
  for (std::size_t l = 0; l < config_.conv_layers; ++l) {
    const std::string prefix = "conv" + std::to_string(l) + ".";
    ConvLayerIndex idx;
    if (config_.kind == ConvKind::gegen) {
      for (std::size_t rho = 0; rho < config_.zeta; ++rho) {
        idx.thetas.push_back(params_.add(prefix + "theta" + std::to_string(rho),
                                         DenseMatrix(1, rho + 1, init_coeff)));
        idx.weights.push_back(params_.add(prefix + "W" + std::to_string(rho),
                                          uniform_fan_in(width, config_.conv_hidden, rng)));
      }
      idx.mu = params_.add(prefix + "mu", DenseMatrix(1, config_.zeta, init_coeff));
    } else {
      idx.weights.push_back(params_.add(prefix + "W", uniform_fan_in(width, config_.conv_hidden, rng)));
    }
    conv_.push_back(std::move(idx));
    width = config_.conv_hidden;
  }
  for (std::size_t l = 0; l < config_.linear_layers; ++l) {
    const std::string prefix = "lin" + std::to_string(l) + ".";
    LinearIndex li;
    li.weight = params_.add(prefix + "W", uniform_fan_in(width, config_.linear_hidden, rng));
    li.bias = params_.add(prefix + "b", DenseMatrix(1, config_.linear_hidden));
    linear_.push_back(li);
    width = config_.linear_hidden;
  }
  output_.weight = params_.add("out.W", uniform_fan_in(width, output_width_, rng));
  output_.bias = params_.add("out.b", DenseMatrix(1, output_width_));
}

Var GegenGnn::activate(Var x) const {
  switch (config_.activation) {
    case Activation::relu: return num::relu(x);
    case Activation::tanh: return num::tanh(x);
    case Activation::identity: return x;
  }
  return x;
}

Var GegenGnn::forward(Tape& tape, std::span<const Var> params, const graphs::LaplacianBundle& bundle,
                      Var input, Mode mode, num::Rng& dropout_rng, const BasisFn& basis_fn) const {
  (void)tape;
  if (params.size() != params_.size()) throw ContractError("GegenGnn::forward: parameter count mismatch");
  if (input.value().cols() != input_width_) {
    throw ShapeError("GegenGnn::forward: input width " + std::to_string(input.value().cols()) +
                     " but model expects " + std::to_string(input_width_));
  }
  if (input.value().rows() != bundle.nodes()) {
    throw ShapeError("GegenGnn::forward: input has " + std::to_string(input.value().rows()) +
                     " rows but graph has " + std::to_string(bundle.nodes()) + " nodes");
  }
  const bool training = mode == Mode::train;
  Var h = input;
  for (const auto& layer : conv_) {
    if (config_.kind == ConvKind::gegen) {
      std::vector<Var> basis = basis_fn ? basis_fn(bundle.scaled, h, config_.zeta, config_.alpha)
                                        : poly::gegenbauer_basis(bundle.scaled, h, config_.zeta, config_.alpha);
      std::vector<Var> thetas;
      std::vector<Var> weights;
      for (std::size_t i : layer.thetas) thetas.push_back(params[i]);
      for (std::size_t i : layer.weights) weights.push_back(params[i]);
      h = cascade_forward(thetas, weights, params[layer.mu], basis);
    } else {
      h = num::matmul(num::spmm(bundle.gcn_propagation, h), params[layer.weights[0]]);
    }
    h = num::dropout(activate(h), config_.dropout, dropout_rng, training);
  }
  for (const auto& li : linear_) {
    h = activate(num::add_row_bias(num::matmul(h, params[li.weight]), params[li.bias]));
  }
  return num::add_row_bias(num::matmul(h, params[output_.weight]), params[output_.bias]);
}

DenseMatrix GegenGnn::predict(const graphs::LaplacianBundle& bundle, const DenseMatrix& input) const {
  Tape tape;
  auto vars = params_.bind(tape);
  num::Rng unused(0);
  return forward(tape, vars, bundle, tape.constant(input), Mode::eval, unused).value();
}

BaselineKind parse_baseline(std::string_view name) {
  if (name == "chebnet") return BaselineKind::chebnet;
  if (name == "gcn") return BaselineKind::gcn;
  throw ParameterError("unknown baseline '" + std::string(name) + "'");
}

GegenGnn make_baseline(BaselineKind kind, ModelConfig config, std::size_t input_width,
                       std::size_t output_width, std::uint64_t init_seed) {
  if (kind == BaselineKind::chebnet) {
    config.kind = ConvKind::gegen;
    config.alpha = 0.0;
  } else {
    config.kind = ConvKind::gcn;
  }
  return GegenGnn(config, input_width, output_width, init_seed);
}

nlohmann::json to_json(const ModelConfig& cfg) {
  return {
      {"kind", std::string(conv_kind_name(cfg.kind))},
      {"conv_layers", cfg.conv_layers},
      {"conv_hidden", cfg.conv_hidden},
      {"linear_layers", cfg.linear_layers},
      {"linear_hidden", cfg.linear_hidden},
      {"dropout", cfg.dropout},
      {"alpha", cfg.alpha},
      {"zeta", cfg.zeta},
      {"activation", std::string(activation_name(cfg.activation))},
  };
}

ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig cfg) {
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "kind") cfg.kind = parse_conv_kind(value.get<std::string>());
      else if (key == "conv_layers") cfg.conv_layers = value.get<std::size_t>();
      else if (key == "conv_hidden") cfg.conv_hidden = value.get<std::size_t>();
      else if (key == "linear_layers") cfg.linear_layers = value.get<std::size_t>();
      else if (key == "linear_hidden") cfg.linear_hidden = value.get<std::size_t>();
      else if (key == "dropout") cfg.dropout = value.get<double>();
      else if (key == "alpha") cfg.alpha = value.get<double>();
      else if (key == "zeta") cfg.zeta = value.get<std::size_t>();
      else if (key == "activation") cfg.activation = parse_activation(value.get<std::string>());
      else throw ConfigError("unknown model key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("model key '" + key + "': " + e.what());
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }
  cfg.validate();
  return cfg;
}

void save_checkpoint(const std::filesystem::path& path, const GegenGnn& model) {
  {
    auto out = io::open_output(path);
    for (const auto& p : model.params()) {
      out << p.name << ',' << p.value.rows() << ',' << p.value.cols();
      for (double v : p.value.data()) out << ',' << io::format_double(v);
      out << '\n';
    }
  }
  nlohmann::json meta = {{"model", to_json(model.config())},
                         {"input_width", model.input_width()},
                         {"output_width", model.output_width()}};
  auto out = io::open_output(path.string() + ".json");
  out << meta.dump(2) << '\n';
}

GegenGnn load_checkpoint(const std::filesystem::path& path) {
  std::ifstream meta_in(path.string() + ".json");
  if (!meta_in) throw IngestError("cannot open checkpoint config '" + path.string() + ".json'");
  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw IngestError("checkpoint config: " + std::string(e.what()));
  }
  GegenGnn model(model_config_from_json(meta.at("model")), meta.at("input_width").get<std::size_t>(),
                 meta.at("output_width").get<std::size_t>(), 0);
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open checkpoint '" + path.string() + "'");
  std::string line;
  std::size_t loaded = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string name, cell;
    std::getline(ss, name, ',');
    std::getline(ss, cell, ',');
    const auto rows = std::stoul(cell);
    std::getline(ss, cell, ',');
    const auto cols = std::stoul(cell);
    std::vector<double> values;
    while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    auto& p = model.params()[model.params().index_of(name)];
    if (p.value.rows() != rows || p.value.cols() != cols) {
      throw IngestError("checkpoint: shape mismatch for '" + name + "'");
    }
    p.value = DenseMatrix(rows, cols, std::move(values));
    ++loaded;
  }
  if (loaded != model.params().size()) throw IngestError("checkpoint: missing parameters");
  return model;
}

}  // namespace gegen::model
