#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cil/env/gridworld.hpp"
#include "cil/env/tabular_mdp.hpp"
#include "cil/sc/datasets.hpp"

namespace cil::demo {

// Component 0 is the optimal policy; its weight is the class prior alpha.
// Component i contributes round(weights[i] * pairs_per_policy * K) pairs for K
// components, so equal weights give pairs_per_policy pairs each.
struct MixtureSpec {
  std::vector<env::StochasticPolicy> policies;
  std::vector<double> weights;
  std::size_t pairs_per_policy = 500;
};

// Exact occupancy tables behind a mixture. p_non is the renormalized
// non-optimal part and is all zeros when alpha == 1.
struct MixtureOccupancy {
  double alpha = 1.0;
  std::vector<double> p;
  std::vector<double> p_opt;
  std::vector<double> p_non;
  int n_actions = 0;

  double p_at(env::StateAction x) const { return p[env::flat_index(n_actions, x)]; }
};

struct DemoDataset {
  std::vector<env::StateAction> pairs;
  // Index of the generating policy per pair.
  std::vector<int> component;
};

struct MixtureResult {
  DemoDataset data;
  MixtureOccupancy occupancy;
};

MixtureResult build_mixture(const env::TabularMDP& mdp, const MixtureSpec& spec, std::uint64_t rng_seed);

// alpha p_opt(x) / p(x); ConfigError when p(x) == 0.
double oracle_confidence(env::StateAction x, const MixtureOccupancy& occupancy);

struct LabelingSpec {
  double labeled_fraction = 0.2;
  double noise_sigma = 0.0;
};

using ConfidenceOracle = std::function<double(env::StateAction)>;

struct LabeledSplit {
  sc::ConfidenceDataset dc;
  sc::UnlabeledDataset du;
  std::vector<env::StateAction> labeled_pairs;
  std::vector<env::StateAction> unlabeled_pairs;
  // Noise-free oracle value for each labeled record.
  std::vector<double> r_clean;
};

// A uniformly random subset of round(fraction * N) records gets
// clip(oracle(x) + eps, 0, 1) with eps ~ N(0, sigma^2). Subset choice and
// noise come from separate streams, so sigma does not move the split.
LabeledSplit apply_labeling(const DemoDataset& data, const LabelingSpec& labeling, const ConfidenceOracle& oracle,
                            const env::FeatureMap& features, std::uint64_t rng_seed);

// Keeps a seeded random subset of round(fraction * n_u) unlabeled records.
// fraction == 1 returns the input unchanged.
LabeledSplit subsample_unlabeled(const LabeledSplit& split, double fraction, const env::FeatureMap& features,
                                 std::uint64_t rng_seed);

// Parity mode: a classifier trained on component membership (optimal vs not)
// over the whole dataset stands in for the exact posterior.
ConfidenceOracle surrogate_oracle(const DemoDataset& data, const env::FeatureMap& features, int epochs,
                                  std::uint64_t rng_seed);

// The desk protocol's mixture: the greedy optimal policy plus softmax(Q*/T)
// snapshots for each intermediate temperature, all at equal weight.
MixtureSpec default_mixture(const env::TabularMDP& mdp, const std::vector<double>& intermediate_temperatures,
                            std::size_t pairs_per_policy);

// FNV-1a over the %.17g renderings of a table.
std::string table_checksum(const std::vector<double>& table);

nlohmann::json manifest(const MixtureSpec& spec, const LabelingSpec& labeling, std::uint64_t seed,
                        const MixtureOccupancy& occupancy, const LabeledSplit& split);

}  // namespace cil::demo
