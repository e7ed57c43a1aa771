#include "gegen/harness/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "gegen/io/csv.hpp"
#include "gegen/log.hpp"
#include "gegen/num/errors.hpp"

namespace gegen::harness {

void Hyperparams::validate() const {
  model.validate();
  loss.validate();
  if (!(learning_rate > 0.0)) throw ParameterError("learning_rate must be > 0");
  if (!(weight_decay >= 0.0)) throw ParameterError("weight_decay must be >= 0");
}

Hyperparams appendix_d_preset() {
  Hyperparams h;
  h.model.kind = model::ConvKind::gegen;
  h.model.conv_layers = 1;
  h.model.conv_hidden = 9;
  h.model.linear_layers = 1;
  h.model.linear_hidden = 2;
  h.model.dropout = 0.03;
  h.model.alpha = 1.17;
  h.model.zeta = 4;
  h.learning_rate = 0.017;
  h.weight_decay = 4.6e-4;
  h.loss.lambda = 1.5e-4;
  h.loss.epsilon = 0.04;
  return h;
}

namespace {

void check_range(const char* name, IntRange r, std::int64_t min) {
  if (r.lo > r.hi || r.lo < min) throw ConfigError(std::string("search space: bad range for ") + name);
}

void check_range(const char* name, RealRange r, double min) {
  if (!(r.lo <= r.hi) || r.lo < min || !std::isfinite(r.hi)) {
    throw ConfigError(std::string("search space: bad range for ") + name);
  }
}

std::int64_t draw(num::Rng& rng, IntRange r) {
  const auto v = rng.below(static_cast<std::uint64_t>(r.hi - r.lo + 1));
  return r.lo + static_cast<std::int64_t>(v);
}

double draw(num::Rng& rng, RealRange r) { return r.lo + (r.hi - r.lo) * rng.uniform(); }

bool inside(IntRange r, std::size_t v) {
  const auto s = static_cast<std::int64_t>(v);
  return s >= r.lo && s <= r.hi;
}

bool inside(RealRange r, double v) { return v >= r.lo && v <= r.hi; }

}  // namespace

void SearchSpace::validate() const {
  check_range("conv_layers", conv_layers, 1);
  check_range("conv_hidden", conv_hidden, 1);
  check_range("linear_layers", linear_layers, 0);
  check_range("linear_hidden", linear_hidden, 1);
  check_range("zeta", zeta, 1);
  check_range("learning_rate", learning_rate, 0.0);
  if (!(learning_rate.hi > 0.0)) throw ConfigError("search space: learning_rate must be positive");
  check_range("dropout", dropout, 0.0);
  if (!(dropout.hi < 1.0)) throw ConfigError("search space: dropout must be below 1");
  check_range("lambda", lambda, 0.0);
  check_range("epsilon", epsilon, 0.0);
  check_range("alpha", alpha, -0.5);
  if (!(alpha.hi > -0.5)) throw ConfigError("search space: alpha must exceed -1/2");
}

Hyperparams SearchSpace::sample(num::Rng& rng, const Hyperparams& base) const {
  Hyperparams h = base;
  h.model.conv_layers = static_cast<std::size_t>(draw(rng, conv_layers));
  h.model.conv_hidden = static_cast<std::size_t>(draw(rng, conv_hidden));
  h.model.linear_layers = static_cast<std::size_t>(draw(rng, linear_layers));
  h.model.linear_hidden = static_cast<std::size_t>(draw(rng, linear_hidden));
  h.model.zeta = static_cast<std::size_t>(draw(rng, zeta));
  h.learning_rate = draw(rng, learning_rate);
  h.model.dropout = draw(rng, dropout);
  h.loss.lambda = draw(rng, lambda);
  h.loss.epsilon = draw(rng, epsilon);
  h.model.alpha = draw(rng, alpha);
  if (h.model.alpha <= -0.5) h.model.alpha = std::nextafter(-0.5, 0.0);
  return h;
}

bool SearchSpace::contains(const Hyperparams& h) const {
  return inside(conv_layers, h.model.conv_layers) && inside(conv_hidden, h.model.conv_hidden) &&
         inside(linear_layers, h.model.linear_layers) && inside(linear_hidden, h.model.linear_hidden) &&
         inside(zeta, h.model.zeta) && inside(learning_rate, h.learning_rate) &&
         inside(dropout, h.model.dropout) && inside(lambda, h.loss.lambda) &&
         inside(epsilon, h.loss.epsilon) && inside(alpha, h.model.alpha) && h.model.alpha > -0.5;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

recon::TrainResult fit_gnn(const Hyperparams& h, const DenseMatrix& y, const graphs::LaplacianBundle& bundle,
                           std::span<const Entry> train, std::span<const Entry> validation,
                           std::uint64_t seed) {
  h.validate();
  if (y.cols() < 2) throw ShapeError("fit_gnn: need at least two time steps");
  const num::Rng root(seed);
  model::GegenGnn net(h.model, y.cols() - 1, y.cols(), root.split(0).next_u64());
  recon::TrainConfig tc;
  tc.epochs = h.epochs;
  tc.adam.learning_rate = h.learning_rate;
  tc.adam.weight_decay = h.weight_decay;
  tc.loss = h.loss;
  tc.seed = root.split(1).next_u64();
  return recon::train(std::move(net), bundle, y, train, validation, tc);
}

std::vector<FoldSplit> make_folds(std::span<const Entry> development, std::size_t folds,
                                  double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
  const auto n_train =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(development.size())));
  if (n_train == 0 || n_train >= development.size()) {
    throw ConfigError("degenerate split: " + std::to_string(development.size()) +
                      " development entries leave an empty training or validation set");
  }
  const num::Rng root(seed);
  std::vector<FoldSplit> out;
  out.reserve(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<Entry> shuffled(development.begin(), development.end());
    num::Rng rng = root.split(f);
    rng.shuffle(std::span<Entry>(shuffled));
    FoldSplit split;
    split.train.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.validation.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train), shuffled.end());
    out.push_back(std::move(split));
  }
  return out;
}

void CvConfig::validate() const {
  if (trials < 1) throw ConfigError("cross-validation: trials must be >= 1");
  if (folds < 1) throw ConfigError("cross-validation: folds must be >= 1");
}

std::size_t select_best(std::span<const double> medians) {
  if (medians.empty()) throw ContractError("select_best: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < medians.size(); ++i)
    if (medians[i] < medians[best]) best = i;
  return best;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

CvResult evaluate_configs(std::vector<Hyperparams> candidates, const DenseMatrix& y,
                          const graphs::LaplacianBundle& bundle, std::span<const Entry> development,
                          const CvConfig& cfg) {
  cfg.validate();
  if (candidates.empty()) throw ConfigError("cross-validation: no candidate configurations");
  const num::Rng root(cfg.seed);
  const auto folds = make_folds(development, cfg.folds, cfg.train_fraction, root.split(1).next_u64());
  const num::Rng fit_seeds = root.split(2);

  CvResult result;
  result.candidates = std::move(candidates);
  const std::size_t trials = result.candidates.size();
  result.table.resize(trials * cfg.folds);
  parallel_for(result.table.size(), cfg.threads, [&](std::size_t cell) {
    const std::size_t trial = cell / cfg.folds;
    const std::size_t fold = cell % cfg.folds;
    double val = std::numeric_limits<double>::infinity();
    try {
      val = fit_gnn(result.candidates[trial], y, bundle, folds[fold].train, folds[fold].validation,
                    fit_seeds.split(fold).next_u64())
                .best_val_rmse;
    } catch (const recon::TrainingDiverged& e) {
      warn("trial " + std::to_string(trial) + " fold " + std::to_string(fold) + ": " + e.what());
    }
    result.table[cell] = {trial, fold, val};
  });

  result.median_val_rmse.resize(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> vals;
    for (std::size_t f = 0; f < cfg.folds; ++f) vals.push_back(result.table[t * cfg.folds + f].val_rmse);
    result.median_val_rmse[t] = median(std::move(vals));
  }
  result.best = select_best(result.median_val_rmse);
  return result;
}

CvResult monte_carlo_cv(const DenseMatrix& y, const graphs::LaplacianBundle& bundle,
                        std::span<const Entry> development, const SearchSpace& space,
                        const Hyperparams& base, const CvConfig& cfg) {
  cfg.validate();
  space.validate();
  num::Rng rng = num::Rng(cfg.seed).split(0);
  std::vector<Hyperparams> candidates;
  candidates.reserve(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) candidates.push_back(space.sample(rng, base));
  return evaluate_configs(std::move(candidates), y, bundle, development, cfg);
}

void write_trial_table(const std::filesystem::path& path, const CvResult& result) {
  auto out = io::open_output(path);
  out << "trial,fold,val_rmse,median_val_rmse,kind,conv_layers,conv_hidden,linear_layers,linear_hidden,"
         "zeta,alpha,dropout,learning_rate,weight_decay,lambda,epsilon,epochs\n";
  for (const auto& row : result.table) {
    const Hyperparams& h = result.candidates[row.trial];
    out << row.trial << ',' << row.fold << ',' << io::format_double(row.val_rmse) << ','
        << io::format_double(result.median_val_rmse[row.trial]) << ',' << model::conv_kind_name(h.model.kind)
        << ',' << h.model.conv_layers << ',' << h.model.conv_hidden << ',' << h.model.linear_layers << ','
        << h.model.linear_hidden << ',' << h.model.zeta << ',' << io::format_double(h.model.alpha) << ','
        << io::format_double(h.model.dropout) << ',' << io::format_double(h.learning_rate) << ','
        << io::format_double(h.weight_decay) << ',' << io::format_double(h.loss.lambda) << ','
        << io::format_double(h.loss.epsilon) << ',' << h.epochs << '\n';
  }
}

}  // namespace gegen::harness
