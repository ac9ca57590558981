#include "cil/bench/experiment.hpp"

#include <chrono>
#include <cmath>
#include <map>

#include "cil/errors.hpp"
#include "cil/policy/soft_pi.hpp"
#include "cil/rng.hpp"
#include "cil/sc/sc_risk.hpp"

namespace cil::bench {

namespace {

// Stream ids under the run seed. Data streams are shared by every method so
// that methods compared at one seed see the same demonstrations.
constexpr std::uint64_t kMixtureStream = 10;
constexpr std::uint64_t kLabelStream = 11;
constexpr std::uint64_t kUnlabeledStream = 12;
constexpr std::uint64_t kClassifierStream = 13;
constexpr std::uint64_t kDiscriminatorStream = 14;
constexpr std::uint64_t kSurrogateStream = 15;
constexpr std::uint64_t kRolloutStreamBase = 1000;

gail::WeightedBatch samples_of(const nn::Inputs& x, gail::Source source) {
  return gail::WeightedBatch::samples(x, source);
}

double prior_of(const sc::ConfidenceDataset& dc) {
  require(dc.size() > 0, "this method needs confidence-labeled data");
  return sc::estimate_prior(dc);
}

}  // namespace

std::string method_name(Method method) {
  switch (method) {
    case Method::IcGail:
      return "ic-gail";
    case Method::TwoIwil:
      return "2iwil";
    case Method::GailUC:
      return "gail-uc";
    case Method::GailC:
      return "gail-c";
    case Method::GailReweight:
      return "gail-reweight";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : all_methods()) {
    if (method_name(m) == name) return m;
  }
  throw ConfigError("unknown method '" + name + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::IcGail, Method::TwoIwil, Method::GailUC, Method::GailC,
                                           Method::GailReweight};
  return methods;
}

RunConfig RunConfig::profile(const std::string& name) {
  RunConfig cfg;
  if (name == "fast") return cfg;
  if (name == "full") {
    cfg.env.gamma = 0.995;
    cfg.train.agent_batch = 5000;
    return cfg;
  }
  throw ConfigError("unknown profile '" + name + "'");
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json traps = nlohmann::json::array();
  for (const auto& [r, c] : cfg.env.traps) traps.push_back({r, c});
  nlohmann::json doc;
  doc["env"] = {{"rows", cfg.env.rows},
                {"cols", cfg.env.cols},
                {"slip", cfg.env.slip},
                {"gamma", cfg.env.gamma},
                {"goal", {cfg.env.goal_row, cfg.env.goal_col}},
                {"goal_reward", cfg.env.goal_reward},
                {"traps", traps},
                {"trap_reward", cfg.env.trap_reward},
                {"start", cfg.env.start}};
  doc["data"] = {{"pairs_per_policy", cfg.data.pairs_per_policy},
                 {"intermediate_temperatures", cfg.data.intermediate_temperatures},
                 {"label_frac", cfg.data.labeling.labeled_fraction},
                 {"noise_sigma", cfg.data.labeling.noise_sigma},
                 {"unlabeled_fraction", cfg.data.unlabeled_fraction},
                 {"surrogate_oracle", cfg.data.surrogate_oracle},
                 {"surrogate_epochs", cfg.data.surrogate_epochs}};
  doc["train"] = {{"iters", cfg.train.iterations},
                  {"tau", cfg.train.tau},
                  {"beta", cfg.train.beta ? nlohmann::json(*cfg.train.beta) : nlohmann::json("auto")},
                  {"nonneg", cfg.train.nonneg},
                  {"disc_steps", cfg.train.disc_steps},
                  {"agent_batch", cfg.train.agent_batch},
                  {"disc_lr", cfg.train.disc_learning_rate},
                  {"policy_temperature", cfg.train.policy_temperature},
                  {"policy_anneal", cfg.train.policy_anneal},
                  {"min_prob", cfg.train.min_prob},
                  {"classifier_epochs", cfg.train.classifier.epochs},
                  {"classifier_batch", cfg.train.classifier.batch_size},
                  {"classifier_patience", cfg.train.classifier.patience}};
  return doc;
}

RunConfig run_config_from_json(const nlohmann::json& doc, RunConfig cfg) {
  require(doc.is_object(), "config must be a JSON object");
  try {
    if (doc.contains("env")) {
      const auto& e = doc.at("env");
      cfg.env.rows = e.value("rows", cfg.env.rows);
      cfg.env.cols = e.value("cols", cfg.env.cols);
      cfg.env.slip = e.value("slip", cfg.env.slip);
      cfg.env.gamma = e.value("gamma", cfg.env.gamma);
      if (e.contains("goal")) {
        cfg.env.goal_row = e.at("goal").at(0).get<int>();
        cfg.env.goal_col = e.at("goal").at(1).get<int>();
      }
      cfg.env.goal_reward = e.value("goal_reward", cfg.env.goal_reward);
      if (e.contains("traps")) {
        cfg.env.traps.clear();
        for (const auto& t : e.at("traps")) cfg.env.traps.emplace_back(t.at(0).get<int>(), t.at(1).get<int>());
      }
      cfg.env.trap_reward = e.value("trap_reward", cfg.env.trap_reward);
      cfg.env.start = e.value("start", cfg.env.start);
    }
    if (doc.contains("data")) {
      const auto& d = doc.at("data");
      cfg.data.pairs_per_policy = d.value("pairs_per_policy", cfg.data.pairs_per_policy);
      cfg.data.intermediate_temperatures = d.value("intermediate_temperatures", cfg.data.intermediate_temperatures);
      cfg.data.labeling.labeled_fraction = d.value("label_frac", cfg.data.labeling.labeled_fraction);
      cfg.data.labeling.noise_sigma = d.value("noise_sigma", cfg.data.labeling.noise_sigma);
      cfg.data.unlabeled_fraction = d.value("unlabeled_fraction", cfg.data.unlabeled_fraction);
      cfg.data.surrogate_oracle = d.value("surrogate_oracle", cfg.data.surrogate_oracle);
      cfg.data.surrogate_epochs = d.value("surrogate_epochs", cfg.data.surrogate_epochs);
    }
    if (doc.contains("train")) {
      const auto& t = doc.at("train");
      cfg.train.iterations = t.value("iters", cfg.train.iterations);
      cfg.train.tau = t.value("tau", cfg.train.tau);
      if (t.contains("beta")) {
        const auto& b = t.at("beta");
        if (b.is_string()) {
          require(b.get<std::string>() == "auto", "beta must be a number or \"auto\"");
          cfg.train.beta.reset();
        } else {
          cfg.train.beta = b.get<double>();
        }
      }
      cfg.train.nonneg = t.value("nonneg", cfg.train.nonneg);
      cfg.train.disc_steps = t.value("disc_steps", cfg.train.disc_steps);
      cfg.train.agent_batch = t.value("agent_batch", cfg.train.agent_batch);
      cfg.train.disc_learning_rate = t.value("disc_lr", cfg.train.disc_learning_rate);
      cfg.train.policy_temperature = t.value("policy_temperature", cfg.train.policy_temperature);
      cfg.train.policy_anneal = t.value("policy_anneal", cfg.train.policy_anneal);
      cfg.train.min_prob = t.value("min_prob", cfg.train.min_prob);
      cfg.train.classifier.epochs = t.value("classifier_epochs", cfg.train.classifier.epochs);
      cfg.train.classifier.batch_size = t.value("classifier_batch", cfg.train.classifier.batch_size);
      cfg.train.classifier.patience = t.value("classifier_patience", cfg.train.classifier.patience);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

double normalize_return(double raw, double j_opt, double j_rand) {
  require(j_opt != j_rand, "normalization needs j_opt != j_rand");
  return (raw - j_rand) / (j_opt - j_rand);
}

Prepared prepare(const RunConfig& cfg, std::uint64_t seed) {
  env::TabularMDP mdp = env::make_gridworld(cfg.env);
  env::FeatureMap features(mdp.n_states(), mdp.n_actions());
  const double j_opt = env::expected_return(mdp, env::solve_optimal_policy(mdp, 0.0));
  const double j_rand = env::expected_return(mdp, env::StochasticPolicy::uniform(mdp.n_states(), mdp.n_actions()));

  const auto spec = demo::default_mixture(mdp, cfg.data.intermediate_temperatures, cfg.data.pairs_per_policy);
  demo::MixtureResult mixture = demo::build_mixture(mdp, spec, derive_seed(seed, kMixtureStream));
  demo::ConfidenceOracle oracle;
  if (cfg.data.surrogate_oracle) {
    oracle = demo::surrogate_oracle(mixture.data, features, cfg.data.surrogate_epochs,
                                    derive_seed(seed, kSurrogateStream));
  } else {
    const demo::MixtureOccupancy occ = mixture.occupancy;
    oracle = [occ](env::StateAction x) { return demo::oracle_confidence(x, occ); };
  }
  demo::LabeledSplit split =
      demo::apply_labeling(mixture.data, cfg.data.labeling, oracle, features, derive_seed(seed, kLabelStream));
  split = demo::subsample_unlabeled(split, cfg.data.unlabeled_fraction, features,
                                    derive_seed(seed, kUnlabeledStream));
  return {std::move(mdp), features, j_opt, j_rand, std::move(mixture), std::move(split)};
}

MethodInputs bind_inputs(Method method, const sc::ConfidenceDataset& dc, const sc::UnlabeledDataset& du,
                         const TrainConfig& train, std::uint64_t seed) {
  using gail::Source;
  using gail::WeightedBatch;
  MethodInputs in;
  switch (method) {
    case Method::IcGail: {
      const double alpha_hat = prior_of(dc);
      in.objective = gail::DiscObjective::ic_gail(alpha_hat, train.tau);
      in.unlabeled =
          WeightedBatch::concat(samples_of(du.x, Source::Unlabeled), samples_of(dc.x, Source::Unlabeled),
                                Source::Unlabeled)
              .compacted();
      if (in.objective.lambda < 1.0) in.confidence = WeightedBatch::confidence(dc.x, dc.r).compacted();
      break;
    }
    case Method::TwoIwil: {
      const double alpha_hat = prior_of(dc);
      const double beta = du.size() == 0 ? 0.0 : train.beta.value_or(sc::beta_default(dc.size(), du.size()));
      require(beta >= 0.0 && beta <= 1.0, "beta must lie in [0, 1]");
      const sc::ScRiskConfig cfg{nn::LossFn::Logistic, beta, train.nonneg};
      const auto g = sc::train_classifier(dc, du, cfg, train.classifier, derive_seed(seed, kClassifierStream));
      const auto predicted = WeightedBatch(du.x, sc::predict_confidence(g, du.x),
                                           Eigen::VectorXd::Ones(du.size()), Source::Confidence);
      in.objective = gail::DiscObjective::reweighted(alpha_hat);
      in.confidence =
          WeightedBatch::concat(WeightedBatch::confidence(dc.x, dc.r), predicted, Source::Confidence).compacted();
      break;
    }
    case Method::GailUC:
      require(dc.size() + du.size() > 0, "GAIL(U+C) needs demonstrations");
      in.objective = gail::DiscObjective::vanilla();
      in.demo = WeightedBatch::concat(samples_of(du.x, Source::Demo), samples_of(dc.x, Source::Demo), Source::Demo)
                    .compacted();
      break;
    case Method::GailC:
      require(du.size() == 0, "GAIL(C) learns from labeled demonstrations only; unlabeled data was supplied");
      require(dc.size() > 0, "GAIL(C) needs confidence-labeled demonstrations");
      in.objective = gail::DiscObjective::vanilla();
      in.demo = samples_of(dc.x, Source::Demo).compacted();
      break;
    case Method::GailReweight:
      in.objective = gail::DiscObjective::reweighted(prior_of(dc));
      in.confidence = WeightedBatch::confidence(dc.x, dc.r).compacted();
      break;
  }
  return in;
}

std::vector<RunRecord> run_adversarial(Method method, const Prepared& prepared, const MethodInputs& inputs,
                                       const TrainConfig& train, std::uint64_t seed) {
  require(train.iterations >= 0, "iteration count must be non-negative");
  require(train.disc_steps >= 1, "at least one discriminator step per iteration is required");
  require(train.agent_batch >= 1, "agent batch must be positive");
  const auto start = std::chrono::steady_clock::now();
  const auto& mdp = prepared.mdp;
  const auto& features = prepared.features;
  const nn::Inputs all_pairs = features.all_pairs();

  nn::Approximator disc = nn::Approximator::standard(features.dim(), derive_seed(seed, kDiscriminatorStream));
  nn::OptimizerState opt(disc.parameter_count(), train.disc_learning_rate);
  policy::AgentState agent = policy::AgentState::initial(mdp, train.policy_temperature);
  agent.anneal = train.policy_anneal;
  agent.min_prob = train.min_prob;

  const auto terms_for = [&](int iteration) {
    const auto xs = env::sample_rollouts(mdp, agent.policy, train.agent_batch,
                                         derive_seed(seed, kRolloutStreamBase + static_cast<std::uint64_t>(iteration)));
    gail::DiscBatches batches{gail::WeightedBatch::samples(features.encode(xs), gail::Source::Agent).compacted(),
                              inputs.demo, inputs.confidence, inputs.unlabeled};
    return gail::build_terms(inputs.objective, batches);
  };
  const auto record = [&](int iteration, double loss) {
    const double j = env::expected_return(mdp, agent.policy);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return RunRecord{method, seed, iteration, j, normalize_return(j, prepared.j_opt, prepared.j_rand), loss, seconds};
  };

  std::vector<RunRecord> records;
  records.reserve(static_cast<std::size_t>(train.iterations) + 1);
  records.push_back(record(0, gail::evaluate(terms_for(0), disc)));
  for (int it = 1; it <= train.iterations; ++it) {
    const gail::LogTerms terms = terms_for(it);
    double loss = 0.0;
    for (int k = 0; k < train.disc_steps; ++k) loss = gail::disc_step(terms, disc, opt);
    const Eigen::VectorXd reward = gail::agent_reward(disc, all_pairs);
    agent = policy::policy_improve(mdp, agent, std::span<const double>(reward.data(), reward.size()));
    records.push_back(record(it, loss));
  }
  return records;
}

std::vector<RunRecord> run_method(Method method, const RunConfig& cfg, const Prepared& prepared,
                                  std::uint64_t seed) {
  const auto& split = prepared.split;
  const sc::UnlabeledDataset none(nn::Inputs(0, prepared.features.dim()));
  const auto& du = method == Method::GailC ? none : split.du;
  const MethodInputs inputs = bind_inputs(method, split.dc, du, cfg.train, seed);
  return run_adversarial(method, prepared, inputs, cfg.train, seed);
}

std::vector<RunRecord> run_method(Method method, const RunConfig& cfg, std::uint64_t seed) {
  return run_method(method, cfg, prepare(cfg, seed), seed);
}

namespace {

template <typename Apply>
std::vector<SweepRecord> sweep(const std::vector<Method>& methods, const std::vector<double>& settings,
                               const RunConfig& base, const std::vector<std::uint64_t>& seeds, Apply apply) {
  std::vector<SweepRecord> out;
  for (double setting : settings) {
    RunConfig cfg = base;
    apply(cfg, setting);
    for (std::uint64_t seed : seeds) {
      const Prepared prepared = prepare(cfg, seed);
      for (Method m : methods) {
        for (const auto& r : run_method(m, cfg, prepared, seed)) out.push_back({setting, r});
      }
    }
  }
  return out;
}

}  // namespace

std::vector<SweepRecord> run_noise_ablation(const std::vector<Method>& methods, const std::vector<double>& sigmas,
                                            const RunConfig& base, const std::vector<std::uint64_t>& seeds) {
  return sweep(methods, sigmas, base, seeds,
               [](RunConfig& cfg, double sigma) { cfg.data.labeling.noise_sigma = sigma; });
}

std::vector<SweepRecord> run_unlabeled_ablation(const std::vector<Method>& methods,
                                                const std::vector<double>& fractions, const RunConfig& base,
                                                const std::vector<std::uint64_t>& seeds) {
  return sweep(methods, fractions, base, seeds,
               [](RunConfig& cfg, double fraction) { cfg.data.unlabeled_fraction = fraction; });
}

std::vector<FinalSummary> summarize_final(const std::vector<SweepRecord>& records) {
  // (method, setting) -> seed -> last record seen.
  std::map<std::pair<int, double>, std::map<std::uint64_t, RunRecord>> last;
  for (const auto& sr : records) {
    auto& slot = last[{static_cast<int>(sr.record.method), sr.setting}];
    auto it = slot.find(sr.record.seed);
    if (it == slot.end() || it->second.iteration <= sr.record.iteration) slot[sr.record.seed] = sr.record;
  }
  std::vector<FinalSummary> out;
  for (const auto& [key, by_seed] : last) {
    const double n = static_cast<double>(by_seed.size());
    double mean = 0.0;
    for (const auto& [seed, r] : by_seed) mean += r.normalized_return / n;
    double ss = 0.0;
    for (const auto& [seed, r] : by_seed) ss += (r.normalized_return - mean) * (r.normalized_return - mean);
    const double se = by_seed.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    out.push_back({static_cast<Method>(key.first), key.second, mean, se, by_seed.size()});
  }
  return out;
}

}  // namespace cil::bench
