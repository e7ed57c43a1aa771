#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gegen/graphs/graph.hpp"
#include "gegen/num/params.hpp"
#include "gegen/num/rng.hpp"
#include "gegen/num/tape.hpp"

namespace gegen::model {

using num::DenseMatrix;
using num::Tape;
using num::Var;

enum class ConvKind { gegen, gcn };
enum class Activation { relu, tanh, identity };
enum class Mode { train, eval };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);
std::string_view conv_kind_name(ConvKind k);
ConvKind parse_conv_kind(std::string_view name);

struct ModelConfig {
  ConvKind kind = ConvKind::gegen;
  std::size_t conv_layers = 1;
  std::size_t conv_hidden = 9;
  std::size_t linear_layers = 1;
  std::size_t linear_hidden = 2;
  double dropout = 0.03;
  double alpha = 1.17;
  std::size_t zeta = 4;
  Activation activation = Activation::relu;

  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Produces [B_0, ..., B_{zeta-1}] for a layer input. The default is the
// Gegenbauer recurrence; tests substitute independent implementations.
using BasisFn = std::function<std::vector<Var>(const std::shared_ptr<const num::SparseMatrix>& lhat,
                                               Var x, std::size_t zeta, double alpha)>;

// Z = sum_{k < theta.cols()} theta_k B_k W. Throws ContractError when the
// basis holds fewer terms than theta.
Var gegenconv_forward(Var theta, Var weight, std::span<const Var> basis);

// H = sum_rho mu_rho Z_rho where branch rho uses thetas[rho] (rho + 1 terms)
// and weights[rho]. Pre-activation.
Var cascade_forward(std::span<const Var> thetas, std::span<const Var> weights, Var mu,
                    std::span<const Var> basis);

// Encoder-decoder: L_conv cascade (or GCN) layers of width H_conv with
// activation and dropout, L_lin hidden linear layers of width H_lin with
// activation, then a linear output layer of width output_width.
class GegenGnn {
 public:
  GegenGnn(ModelConfig config, std::size_t input_width, std::size_t output_width,
           std::uint64_t init_seed);

  const ModelConfig& config() const { return config_; }
  std::size_t input_width() const { return input_width_; }
  std::size_t output_width() const { return output_width_; }
  num::ParameterSet& params() { return params_; }
  const num::ParameterSet& params() const { return params_; }

  // params must come from bind(tape) on this model's parameter layout.
  Var forward(Tape& tape, std::span<const Var> params, const graphs::LaplacianBundle& bundle,
              Var input, Mode mode, num::Rng& dropout_rng, const BasisFn& basis = {}) const;

  // Eval-mode forward on the current parameters.
  DenseMatrix predict(const graphs::LaplacianBundle& bundle, const DenseMatrix& input) const;

 private:
  struct ConvLayerIndex {
    std::vector<std::size_t> thetas;
    std::vector<std::size_t> weights;
    std::size_t mu = 0;
  };
  struct LinearIndex {
    std::size_t weight;
    std::size_t bias;
  };

  Var activate(Var x) const;

  ModelConfig config_;
  std::size_t input_width_;
  std::size_t output_width_;
  num::ParameterSet params_;
  std::vector<ConvLayerIndex> conv_;
  std::vector<LinearIndex> linear_;
  LinearIndex output_{};
};

enum class BaselineKind { chebnet, gcn };
BaselineKind parse_baseline(std::string_view name);

// chebnet: GegenGNN with alpha pinned to 0 (Chebyshev-I recurrence).
// gcn: symmetric-normalised adjacency propagation with self-loops.
GegenGnn make_baseline(BaselineKind kind, ModelConfig config, std::size_t input_width,
                       std::size_t output_width, std::uint64_t init_seed);

// Flat manifest: one `name,rows,cols,v0,v1,...` line per parameter, with the
// configuration echoed as JSON at `<path>.json`.
void save_checkpoint(const std::filesystem::path& path, const GegenGnn& model);
GegenGnn load_checkpoint(const std::filesystem::path& path);

}  // namespace gegen::model
