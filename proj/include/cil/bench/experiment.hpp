#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cil/demo/pipeline.hpp"
#include "cil/env/gridworld.hpp"
#include "cil/gail/objectives.hpp"
#include "cil/sc/classifier.hpp"

namespace cil::bench {

enum class Method { IcGail, TwoIwil, GailUC, GailC, GailReweight };

std::string method_name(Method method);
Method parse_method(const std::string& name);
const std::vector<Method>& all_methods();

struct DataConfig {
  std::size_t pairs_per_policy = 500;
  std::vector<double> intermediate_temperatures{1.0, 3.0};
  demo::LabelingSpec labeling;
  double unlabeled_fraction = 1.0;
  bool surrogate_oracle = false;
  int surrogate_epochs = 300;
};

struct TrainConfig {
  int iterations = 300;
  double tau = 0.7;
  // nullopt means n_u / (n_c + n_u).
  std::optional<double> beta;
  bool nonneg = true;
  int disc_steps = 5;
  std::size_t agent_batch = 500;
  double disc_learning_rate = 1e-3;
  double policy_temperature = 1.0;
  double policy_anneal = 0.999;
  double min_prob = 1e-6;
  sc::ClassifierTrainOptions classifier;
};

struct RunConfig {
  env::GridworldSpec env;
  DataConfig data;
  TrainConfig train;

  // "fast" keeps the desk defaults; "full" switches to gamma 0.995 and
  // agent batches of 5000.
  static RunConfig profile(const std::string& name);
};

nlohmann::json to_json(const RunConfig& cfg);
// Missing keys keep the values already in `base`.
RunConfig run_config_from_json(const nlohmann::json& doc, RunConfig base);

struct RunRecord {
  Method method = Method::IcGail;
  std::uint64_t seed = 0;
  int iteration = 0;
  double raw_return = 0.0;
  double normalized_return = 0.0;
  double disc_loss = 0.0;
  double wall_time = 0.0;
};

double normalize_return(double raw, double j_opt, double j_rand);

// Everything a run needs that does not depend on the method.
struct Prepared {
  env::TabularMDP mdp;
  env::FeatureMap features;
  double j_opt = 0.0;
  double j_rand = 0.0;
  demo::MixtureResult mixture;
  demo::LabeledSplit split;
};

Prepared prepare(const RunConfig& cfg, std::uint64_t seed);

// Discriminator inputs bound per method:
//   IcGail       unlabeled = D_u + D_c^x, confidence = D_c
//   TwoIwil      confidence = D_c plus D_u with classifier predictions
//   GailUC       demo = D_u + D_c^x
//   GailC        demo = D_c^x; a non-empty D_u is a ConfigError
//   GailReweight confidence = D_c
struct MethodInputs {
  gail::DiscObjective objective;
  gail::WeightedBatch demo;
  gail::WeightedBatch confidence;
  gail::WeightedBatch unlabeled;
};

MethodInputs bind_inputs(Method method, const sc::ConfidenceDataset& dc, const sc::UnlabeledDataset& du,
                         const TrainConfig& train, std::uint64_t seed);

// Alternating discriminator ascent and soft policy iteration from the uniform
// policy. Record 0 is the initial policy; one record per iteration follows.
std::vector<RunRecord> run_adversarial(Method method, const Prepared& prepared, const MethodInputs& inputs,
                                       const TrainConfig& train, std::uint64_t seed);

std::vector<RunRecord> run_method(Method method, const RunConfig& cfg, std::uint64_t seed);
std::vector<RunRecord> run_method(Method method, const RunConfig& cfg, const Prepared& prepared, std::uint64_t seed);

// One sweep point: the swept value (sigma or unlabeled fraction) and its runs.
struct SweepRecord {
  double setting = 0.0;
  RunRecord record;
};

std::vector<SweepRecord> run_noise_ablation(const std::vector<Method>& methods, const std::vector<double>& sigmas,
                                            const RunConfig& base, const std::vector<std::uint64_t>& seeds);
std::vector<SweepRecord> run_unlabeled_ablation(const std::vector<Method>& methods,
                                                const std::vector<double>& fractions, const RunConfig& base,
                                                const std::vector<std::uint64_t>& seeds);

// Mean normalized return at the last recorded iteration, per (method, setting).
struct FinalSummary {
  Method method;
  double setting;
  double mean;
  double stderr_;
  std::size_t n_seeds;
};
std::vector<FinalSummary> summarize_final(const std::vector<SweepRecord>& records);

}  // namespace cil::bench
