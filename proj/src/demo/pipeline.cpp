#include "cil/demo/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <random>

#include "cil/errors.hpp"
#include "cil/nn/loss.hpp"
#include "cil/rng.hpp"
#include "cil/sc/classifier.hpp"

namespace cil::demo {

namespace {

sc::ConfidenceDataset encode_labeled(const env::FeatureMap& features, const std::vector<env::StateAction>& pairs,
                                     const std::vector<double>& r) {
  return sc::ConfidenceDataset(features.encode(pairs), Eigen::Map<const Eigen::VectorXd>(r.data(), r.size()));
}

sc::UnlabeledDataset encode_unlabeled(const env::FeatureMap& features, const std::vector<env::StateAction>& pairs) {
  if (pairs.empty()) return sc::UnlabeledDataset(nn::Inputs(0, features.dim()));
  return sc::UnlabeledDataset(features.encode(pairs));
}

}  // namespace

MixtureResult build_mixture(const env::TabularMDP& mdp, const MixtureSpec& spec, std::uint64_t rng_seed) {
  const std::size_t k = spec.policies.size();
  require(k >= 1, "a mixture needs at least one policy");
  require(spec.weights.size() == k, "one mixing weight per policy is required");
  require(spec.pairs_per_policy >= 1, "pairs_per_policy must be positive");
  double total = 0.0;
  for (double w : spec.weights) {
    require(std::isfinite(w) && w >= 0.0, "mixing weights must be non-negative");
    total += w;
  }
  require(std::abs(total - 1.0) < 1e-9, "mixing weights must sum to 1");
  require(spec.weights[0] > 0.0, "the optimal component needs positive weight");

  const int n = mdp.n_pairs();
  MixtureOccupancy occ;
  occ.alpha = spec.weights[0];
  occ.n_actions = mdp.n_actions();
  occ.p.assign(n, 0.0);
  occ.p_opt.assign(n, 0.0);
  occ.p_non.assign(n, 0.0);

  MixtureResult out;
  const double n_total = static_cast<double>(spec.pairs_per_policy * k);
  for (std::size_t i = 0; i < k; ++i) {
    const env::NormalizedOccupancy component = env::compute_occupancy(mdp, spec.policies[i]);
    const auto table = component.table();
    for (int j = 0; j < n; ++j) {
      occ.p[j] += spec.weights[i] * table[j];
      if (i == 0) {
        occ.p_opt[j] = table[j];
      } else if (occ.alpha < 1.0) {
        occ.p_non[j] += spec.weights[i] / (1.0 - occ.alpha) * table[j];
      }
    }
    const auto count = static_cast<std::size_t>(std::llround(spec.weights[i] * n_total));
    if (count == 0) continue;
    const auto draws = env::sample_rollouts(mdp, spec.policies[i], count, derive_seed(rng_seed, 100 + i));
    out.data.pairs.insert(out.data.pairs.end(), draws.begin(), draws.end());
    out.data.component.insert(out.data.component.end(), draws.size(), static_cast<int>(i));
  }

  std::vector<std::size_t> order(out.data.pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(rng_seed, 0));
  std::shuffle(order.begin(), order.end(), rng);
  DemoDataset shuffled;
  shuffled.pairs.reserve(order.size());
  shuffled.component.reserve(order.size());
  for (std::size_t idx : order) {
    shuffled.pairs.push_back(out.data.pairs[idx]);
    shuffled.component.push_back(out.data.component[idx]);
  }
  out.data = std::move(shuffled);
  out.occupancy = std::move(occ);
  return out;
}

double oracle_confidence(env::StateAction x, const MixtureOccupancy& occupancy) {
  require(x.state >= 0 && x.action >= 0 && x.action < occupancy.n_actions &&
              env::flat_index(occupancy.n_actions, x) < occupancy.p.size(),
          "state-action pair outside the mixture tables");
  const std::size_t j = env::flat_index(occupancy.n_actions, x);
  require(occupancy.p[j] > 0.0, "confidence requested for a pair off the mixture support");
  return std::clamp(occupancy.alpha * occupancy.p_opt[j] / occupancy.p[j], 0.0, 1.0);
}

LabeledSplit apply_labeling(const DemoDataset& data, const LabelingSpec& labeling, const ConfidenceOracle& oracle,
                            const env::FeatureMap& features, std::uint64_t rng_seed) {
  require(labeling.labeled_fraction >= 0.0 && labeling.labeled_fraction <= 1.0,
          "labeled fraction must lie in [0, 1]");
  require(std::isfinite(labeling.noise_sigma) && labeling.noise_sigma >= 0.0, "noise sigma must be non-negative");
  const std::size_t n = data.pairs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng(derive_seed(rng_seed, 0));
  std::shuffle(order.begin(), order.end(), split_rng);
  const auto n_labeled = static_cast<std::size_t>(std::llround(labeling.labeled_fraction * static_cast<double>(n)));
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_labeled));
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(n_labeled), order.end());

  Rng noise_rng(derive_seed(rng_seed, 1));
  std::normal_distribution<double> noise(0.0, 1.0);
  LabeledSplit out;
  std::vector<double> r;
  for (std::size_t i = 0; i < n_labeled; ++i) {
    const env::StateAction x = data.pairs[order[i]];
    const double clean = oracle(x);
    const double eps = noise(noise_rng);
    out.labeled_pairs.push_back(x);
    out.r_clean.push_back(clean);
    r.push_back(labeling.noise_sigma > 0.0 ? std::clamp(clean + labeling.noise_sigma * eps, 0.0, 1.0) : clean);
  }
  for (std::size_t i = n_labeled; i < n; ++i) out.unlabeled_pairs.push_back(data.pairs[order[i]]);
  out.dc = n_labeled > 0 ? encode_labeled(features, out.labeled_pairs, r)
                         : sc::ConfidenceDataset(nn::Inputs(0, features.dim()), Eigen::VectorXd());
  out.du = encode_unlabeled(features, out.unlabeled_pairs);
  return out;
}

LabeledSplit subsample_unlabeled(const LabeledSplit& split, double fraction, const env::FeatureMap& features,
                                 std::uint64_t rng_seed) {
  require(fraction >= 0.0 && fraction <= 1.0, "unlabeled fraction must lie in [0, 1]");
  if (fraction == 1.0) return split;
  const std::size_t n = split.unlabeled_pairs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(rng_seed, 2));
  std::shuffle(order.begin(), order.end(), rng);
  const auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  order.resize(keep);
  std::sort(order.begin(), order.end());
  LabeledSplit out = split;
  out.unlabeled_pairs.clear();
  for (std::size_t idx : order) out.unlabeled_pairs.push_back(split.unlabeled_pairs[idx]);
  out.du = encode_unlabeled(features, out.unlabeled_pairs);
  return out;
}

ConfidenceOracle surrogate_oracle(const DemoDataset& data, const env::FeatureMap& features, int epochs,
                                  std::uint64_t rng_seed) {
  require(!data.pairs.empty(), "surrogate oracle needs demonstrations");
  std::vector<double> y(data.pairs.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = data.component[i] == 0 ? 1.0 : 0.0;
  const auto dc = encode_labeled(features, data.pairs, y);
  // With r in {0, 1} and beta = 0 the semi-conf risk is the ordinary PN risk.
  const sc::ScRiskConfig cfg{nn::LossFn::Logistic, 0.0, false};
  auto net = std::make_shared<nn::Approximator>(
      sc::train_classifier(dc, sc::UnlabeledDataset(nn::Inputs(0, features.dim())), cfg, epochs, rng_seed));
  return [net, features](env::StateAction x) {
    const auto code = features.encode(x);
    return nn::sigmoid_link(net->forward(code));
  };
}

MixtureSpec default_mixture(const env::TabularMDP& mdp, const std::vector<double>& intermediate_temperatures,
                            std::size_t pairs_per_policy) {
  MixtureSpec spec;
  spec.pairs_per_policy = pairs_per_policy;
  spec.policies.push_back(env::solve_optimal_policy(mdp, 0.0));
  for (double t : intermediate_temperatures) {
    require(t > 0.0, "intermediate temperatures must be positive");
    spec.policies.push_back(env::solve_optimal_policy(mdp, t));
  }
  spec.weights.assign(spec.policies.size(), 1.0 / static_cast<double>(spec.policies.size()));
  return spec;
}

std::string table_checksum(const std::vector<double>& table) {
  std::uint64_t h = 1469598103934665603ULL;
  char buf[40];
  for (double v : table) {
    const int len = std::snprintf(buf, sizeof buf, "%.17g;", v);
    for (int i = 0; i < len; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json manifest(const MixtureSpec& spec, const LabelingSpec& labeling, std::uint64_t seed,
                        const MixtureOccupancy& occupancy, const LabeledSplit& split) {
  nlohmann::json doc;
  doc["seed"] = seed;
  doc["mixture"] = {{"n_policies", spec.policies.size()},
                    {"weights", spec.weights},
                    {"pairs_per_policy", spec.pairs_per_policy}};
  doc["labeling"] = {{"labeled_fraction", labeling.labeled_fraction}, {"noise_sigma", labeling.noise_sigma}};
  doc["alpha"] = occupancy.alpha;
  doc["n_labeled"] = split.labeled_pairs.size();
  doc["n_unlabeled"] = split.unlabeled_pairs.size();
  doc["checksums"] = {{"p", table_checksum(occupancy.p)},
                      {"p_opt", table_checksum(occupancy.p_opt)},
                      {"p_non", table_checksum(occupancy.p_non)}};
  return doc;
}

}  // namespace cil::demo
