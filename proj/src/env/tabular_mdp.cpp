#include "cil/env/tabular_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cil/errors.hpp"
#include "cil/rng.hpp"

namespace cil::env {

namespace {

constexpr double kDensityTolerance = 1e-12;
constexpr double kOccupancyTolerance = 1e-9;
// Marginals this small are numerical noise from the dense solve.
constexpr double kZeroMarginal = 1e-14;

void check_density(std::span<const double> values, double tolerance, const std::string& what) {
  double total = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError(what + " has a negative or non-finite entry");
    total += v;
  }
  if (std::abs(total - 1.0) > tolerance) {
    throw ConfigError(what + " sums to " + std::to_string(total) + ", expected 1");
  }
}

}  // namespace

TabularMDP::TabularMDP(int n_states, int n_actions, std::vector<double> transition,
                       std::vector<double> reward, double gamma, std::vector<double> initial_dist)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      gamma_(gamma),
      initial_dist_(std::move(initial_dist)) {
  require(n_states_ > 0 && n_actions_ > 0, "MDP needs at least one state and one action");
  const auto pairs = static_cast<std::size_t>(n_states_) * n_actions_;
  require(transition_.size() == pairs * n_states_, "transition table has wrong size");
  require(reward_.size() == pairs, "reward table has wrong size");
  require(initial_dist_.size() == static_cast<std::size_t>(n_states_), "initial distribution has wrong size");
  require(gamma_ > 0.0 && gamma_ < 1.0, "gamma must lie strictly inside (0, 1)");
  for (int s = 0; s < n_states_; ++s) {
    for (int a = 0; a < n_actions_; ++a) {
      check_density(transition_row(s, a), kDensityTolerance,
                    "transition row (" + std::to_string(s) + "," + std::to_string(a) + ")");
    }
  }
  for (double r : reward_) require(std::isfinite(r), "reward table has a non-finite entry");
  check_density(initial_dist_, kDensityTolerance, "initial distribution");
}

TabularMDP TabularMDP::with_reward(std::vector<double> reward) const {
  return TabularMDP(n_states_, n_actions_, transition_, std::move(reward), gamma_, initial_dist_);
}

nlohmann::json TabularMDP::to_json() const {
  return {{"n_states", n_states_},     {"n_actions", n_actions_}, {"gamma", gamma_},
          {"transition", transition_}, {"reward", reward_},       {"initial_dist", initial_dist_}};
}

TabularMDP TabularMDP::from_json(const nlohmann::json& doc) {
  try {
    return TabularMDP(doc.at("n_states").get<int>(), doc.at("n_actions").get<int>(),
                      doc.at("transition").get<std::vector<double>>(),
                      doc.at("reward").get<std::vector<double>>(), doc.at("gamma").get<double>(),
                      doc.at("initial_dist").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed MDP document: ") + e.what());
  }
}

StochasticPolicy::StochasticPolicy(int n_states, int n_actions, std::vector<double> probs)
    : n_states_(n_states), n_actions_(n_actions), probs_(std::move(probs)) {
  require(n_states_ > 0 && n_actions_ > 0, "policy needs at least one state and one action");
  require(probs_.size() == static_cast<std::size_t>(n_states_) * n_actions_, "policy table has wrong size");
  for (int s = 0; s < n_states_; ++s) {
    check_density(row(s), kDensityTolerance, "policy row " + std::to_string(s));
  }
}

StochasticPolicy StochasticPolicy::uniform(int n_states, int n_actions) {
  return StochasticPolicy(n_states, n_actions,
                          std::vector<double>(static_cast<std::size_t>(n_states) * n_actions,
                                              1.0 / n_actions));
}

NormalizedOccupancy::NormalizedOccupancy(int n_states, int n_actions, std::vector<double> table)
    : n_states_(n_states), n_actions_(n_actions), table_(std::move(table)) {
  require(table_.size() == static_cast<std::size_t>(n_states_) * n_actions_, "occupancy table has wrong size");
  check_density(table_, kOccupancyTolerance, "occupancy");
}

double NormalizedOccupancy::state_marginal(int s) const {
  double total = 0.0;
  for (int a = 0; a < n_actions_; ++a) total += (*this)(s, a);
  return total;
}

void check_compatible(const TabularMDP& mdp, const StochasticPolicy& policy) {
  if (mdp.n_states() != policy.n_states() || mdp.n_actions() != policy.n_actions()) {
    throw ConfigError("policy dimensions do not match the MDP");
  }
}

Eigen::MatrixXd policy_transition_matrix(const TabularMDP& mdp, const StochasticPolicy& policy) {
  check_compatible(mdp, policy);
  const int n = mdp.n_states();
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const double pa = policy.prob(s, a);
      if (pa == 0.0) continue;
      const auto row = mdp.transition_row(s, a);
      for (int next = 0; next < n; ++next) kernel(s, next) += pa * row[next];
    }
  }
  return kernel;
}

NormalizedOccupancy compute_occupancy(const TabularMDP& mdp, const StochasticPolicy& policy) {
  const int n = mdp.n_states();
  const Eigen::MatrixXd kernel = policy_transition_matrix(mdp, policy);
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - mdp.gamma() * kernel.transpose();
  Eigen::VectorXd rhs(n);
  for (int s = 0; s < n; ++s) rhs(s) = (1.0 - mdp.gamma()) * mdp.initial_dist()[s];

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  const Eigen::VectorXd d = lu.solve(rhs);
  if (!d.allFinite()) throw NumericError("occupancy linear system is singular");

  std::vector<double> table(static_cast<std::size_t>(mdp.n_pairs()));
  double total = 0.0;
  for (int s = 0; s < n; ++s) {
    const double ds = std::max(d(s), 0.0);
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const double v = ds * policy.prob(s, a);
      table[static_cast<std::size_t>(s) * mdp.n_actions() + a] = v;
      total += v;
    }
  }
  if (std::abs(total - 1.0) > kOccupancyTolerance) {
    throw NumericError("occupancy solve lost normalization (sum " + std::to_string(total) + ")");
  }
  return NormalizedOccupancy(n, mdp.n_actions(), std::move(table));
}

StochasticPolicy policy_from_occupancy(const NormalizedOccupancy& occ) {
  const int na = occ.n_actions();
  std::vector<double> probs(static_cast<std::size_t>(occ.n_states()) * na);
  for (int s = 0; s < occ.n_states(); ++s) {
    const double marginal = occ.state_marginal(s);
    for (int a = 0; a < na; ++a) {
      probs[static_cast<std::size_t>(s) * na + a] = marginal > kZeroMarginal ? occ(s, a) / marginal : 1.0 / na;
    }
  }
  return StochasticPolicy(occ.n_states(), na, std::move(probs));
}

double expected_return(const TabularMDP& mdp, const StochasticPolicy& policy,
                       std::span<const double> reward) {
  require(reward.size() == static_cast<std::size_t>(mdp.n_pairs()), "reward table has wrong size");
  const NormalizedOccupancy occ = compute_occupancy(mdp, policy);
  double total = 0.0;
  for (std::size_t i = 0; i < reward.size(); ++i) total += occ.at(i) * reward[i];
  return total / (1.0 - mdp.gamma());
}

double expected_return(const TabularMDP& mdp, const StochasticPolicy& policy) {
  return expected_return(mdp, policy, mdp.reward_table());
}

std::vector<double> evaluate_q(const TabularMDP& mdp, const StochasticPolicy& policy,
                               std::span<const double> reward) {
  require(reward.size() == static_cast<std::size_t>(mdp.n_pairs()), "reward table has wrong size");
  const int n = mdp.n_states();
  const int na = mdp.n_actions();
  for (double r : reward) {
    if (!std::isfinite(r)) throw NumericError("reward table has a non-finite entry");
  }
  const Eigen::MatrixXd kernel = policy_transition_matrix(mdp, policy);
  Eigen::VectorXd expected_reward = Eigen::VectorXd::Zero(n);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < na; ++a) expected_reward(s) += policy.prob(s, a) * reward[static_cast<std::size_t>(s) * na + a];
  }
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - mdp.gamma() * kernel;
  const Eigen::VectorXd v = system.partialPivLu().solve(expected_reward);
  if (!v.allFinite()) throw NumericError("policy evaluation system is singular");

  std::vector<double> q(static_cast<std::size_t>(n) * na);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < na; ++a) {
      const auto row = mdp.transition_row(s, a);
      double next = 0.0;
      for (int s2 = 0; s2 < n; ++s2) next += row[s2] * v(s2);
      q[static_cast<std::size_t>(s) * na + a] = reward[static_cast<std::size_t>(s) * na + a] + mdp.gamma() * next;
    }
  }
  return q;
}

ValueIterationResult value_iteration(const TabularMDP& mdp) {
  const int n = mdp.n_states();
  const int na = mdp.n_actions();
  std::vector<double> v(n, 0.0);
  std::vector<double> q(static_cast<std::size_t>(n) * na, 0.0);
  for (int it = 1; it <= kValueIterationCap; ++it) {
    double delta = 0.0;
    std::vector<double> next_v(n, 0.0);
    for (int s = 0; s < n; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < na; ++a) {
        const auto row = mdp.transition_row(s, a);
        double future = 0.0;
        for (int s2 = 0; s2 < n; ++s2) future += row[s2] * v[s2];
        const double value = mdp.reward(s, a) + mdp.gamma() * future;
        q[static_cast<std::size_t>(s) * na + a] = value;
        best = std::max(best, value);
      }
      next_v[s] = best;
      delta = std::max(delta, std::abs(best - v[s]));
    }
    v = std::move(next_v);
    if (delta < kValueIterationTolerance) return {std::move(q), it};
  }
  throw NumericError("value iteration did not converge within the iteration cap");
}

StochasticPolicy solve_optimal_policy(const TabularMDP& mdp, double temperature) {
  require(temperature >= 0.0, "temperature must be non-negative");
  const int n = mdp.n_states();
  const int na = mdp.n_actions();
  const auto q = value_iteration(mdp).q;
  std::vector<double> probs(q.size(), 0.0);
  for (int s = 0; s < n; ++s) {
    const auto begin = q.begin() + static_cast<std::ptrdiff_t>(s) * na;
    const double best = *std::max_element(begin, begin + na);
    double* row = probs.data() + static_cast<std::size_t>(s) * na;
    if (temperature == 0.0) {
      // Ties within the solver tolerance resolve to the lowest action index.
      for (int a = 0; a < na; ++a) {
        if (begin[a] >= best - 10.0 * kValueIterationTolerance) {
          row[a] = 1.0;
          break;
        }
      }
    } else {
      double total = 0.0;
      for (int a = 0; a < na; ++a) {
        row[a] = std::exp((begin[a] - best) / temperature);
        total += row[a];
      }
      for (int a = 0; a < na; ++a) row[a] /= total;
    }
  }
  return StochasticPolicy(n, na, std::move(probs));
}

std::vector<StateAction> sample_rollouts(const TabularMDP& mdp, const StochasticPolicy& policy,
                                         std::size_t n_pairs, std::uint64_t rng_seed) {
  check_compatible(mdp, policy);
  require(n_pairs >= 1, "sample_rollouts needs n_pairs >= 1");
  Rng rng(rng_seed);
  std::vector<StateAction> out;
  out.reserve(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    int s = static_cast<int>(sample_categorical(mdp.initial_dist(), rng));
    while (true) {
      const int a = static_cast<int>(sample_categorical(policy.row(s), rng));
      if (uniform01(rng) >= mdp.gamma()) {
        out.push_back({s, a});
        break;
      }
      s = static_cast<int>(sample_categorical(mdp.transition_row(s, a), rng));
    }
  }
  return out;
}

}  // namespace cil::env
