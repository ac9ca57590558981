#include "cil/sc/classifier.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "cil/errors.hpp"
#include "cil/nn/adam.hpp"
#include "cil/nn/loss.hpp"
#include "cil/rng.hpp"

namespace cil::sc {

namespace {

std::vector<Eigen::Index> iota_indices(Eigen::Index n) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  return idx;
}

ConfidenceDataset subset(const ConfidenceDataset& dc, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) r(static_cast<Eigen::Index>(i)) = dc.r(idx[i]);
  return ConfidenceDataset(rows_of(dc.x, idx), std::move(r));
}

UnlabeledDataset subset(const UnlabeledDataset& du, const std::vector<Eigen::Index>& idx) {
  if (idx.empty()) return UnlabeledDataset(nn::Inputs(0, du.x.cols()));
  return UnlabeledDataset(rows_of(du.x, idx));
}

template <typename T>
std::vector<T> slice(const std::vector<T>& v, std::size_t part, std::size_t parts) {
  const std::size_t begin = v.size() * part / parts;
  const std::size_t end = v.size() * (part + 1) / parts;
  return {v.begin() + static_cast<std::ptrdiff_t>(begin), v.begin() + static_cast<std::ptrdiff_t>(end)};
}

}  // namespace

nn::Approximator train_classifier(const ConfidenceDataset& dc, const UnlabeledDataset& du,
                                  const ScRiskConfig& cfg, const ClassifierTrainOptions& options,
                                  std::uint64_t rng_seed) {
  require(dc.size() >= 1, "classifier training needs at least one confidence record");
  require(!(cfg.beta > 0.0 && du.size() == 0), "beta > 0 needs a non-empty unlabeled set");
  require(options.batch_size >= 1 && options.epochs >= 0, "invalid classifier training options");
  Rng rng(derive_seed(rng_seed, 0));
  nn::Approximator g = nn::Approximator::standard(static_cast<int>(dc.dim()), derive_seed(rng_seed, 1));

  auto c_idx = iota_indices(dc.size());
  auto u_idx = iota_indices(du.size());
  std::shuffle(c_idx.begin(), c_idx.end(), rng);
  std::shuffle(u_idx.begin(), u_idx.end(), rng);

  std::vector<Eigen::Index> c_val;
  std::vector<Eigen::Index> u_val;
  if (options.holdout_fraction > 0.0 && dc.size() >= 10) {
    const auto n_val = static_cast<std::size_t>(options.holdout_fraction * static_cast<double>(dc.size()));
    c_val.assign(c_idx.end() - static_cast<std::ptrdiff_t>(n_val), c_idx.end());
    c_idx.resize(c_idx.size() - n_val);
  }
  if (options.holdout_fraction > 0.0 && du.size() >= 10) {
    const auto n_val = static_cast<std::size_t>(options.holdout_fraction * static_cast<double>(du.size()));
    u_val.assign(u_idx.end() - static_cast<std::ptrdiff_t>(n_val), u_idx.end());
    u_idx.resize(u_idx.size() - n_val);
  }
  const ConfidenceDataset val_c = c_val.empty() ? subset(dc, c_idx) : subset(dc, c_val);
  const UnlabeledDataset val_u = u_val.empty() ? subset(du, u_idx) : subset(du, u_val);
  const auto validation_risk = [&](const nn::Approximator& net) {
    return cfg.use_nonneg ? sc_risk_nonneg(net, val_c, val_u, cfg) : sc_risk(net, val_c, val_u, cfg);
  };

  std::size_t n_batches = (c_idx.size() + u_idx.size() + static_cast<std::size_t>(options.batch_size) - 1) /
                          static_cast<std::size_t>(options.batch_size);
  n_batches = std::clamp<std::size_t>(n_batches, 1, c_idx.size());
  if (cfg.beta > 0.0) n_batches = std::min(n_batches, u_idx.size());

  nn::OptimizerState opt(g.parameter_count(), options.learning_rate);
  Eigen::VectorXd best = g.parameters();
  double best_risk = validation_risk(g);
  int since_best = 0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(c_idx.begin(), c_idx.end(), rng);
    std::shuffle(u_idx.begin(), u_idx.end(), rng);
    for (std::size_t b = 0; b < n_batches; ++b) {
      const auto batch_c = subset(dc, slice(c_idx, b, n_batches));
      const auto batch_u = subset(du, slice(u_idx, b, n_batches));
      const auto vg = sc_risk_value_and_grad(g, batch_c, batch_u, cfg, cfg.use_nonneg);
      nn::optimizer_step(opt, g.mutable_parameters(), vg.gradient);
    }
    const double risk = validation_risk(g);
    if (risk < best_risk) {
      best_risk = risk;
      best = g.parameters();
      since_best = 0;
    } else if (++since_best >= options.patience) {
      break;
    }
  }
  g.set_parameters(best);
  return g;
}

nn::Approximator train_classifier(const ConfidenceDataset& dc, const UnlabeledDataset& du,
                                  const ScRiskConfig& cfg, int epochs, std::uint64_t rng_seed) {
  ClassifierTrainOptions options;
  options.epochs = epochs;
  return train_classifier(dc, du, cfg, options, rng_seed);
}

Eigen::VectorXd predict_confidence(const nn::Approximator& g, const nn::Inputs& x) {
  if (x.rows() == 0) return Eigen::VectorXd();
  Eigen::VectorXd scores = g.forward(x);
  return scores.unaryExpr([](double z) { return nn::sigmoid_link(z); });
}

}  // namespace cil::sc
