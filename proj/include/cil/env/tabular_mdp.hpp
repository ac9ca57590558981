#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace cil::env {

struct StateAction {
  int state = 0;
  int action = 0;

  friend bool operator==(const StateAction&, const StateAction&) = default;
};

// Finite MDP <S, A, P, R, gamma> with an initial state distribution.
// Transition probabilities are stored row-major as [s][a][s'].
class TabularMDP {
 public:
  TabularMDP(int n_states, int n_actions, std::vector<double> transition,
             std::vector<double> reward, double gamma, std::vector<double> initial_dist);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  int n_pairs() const { return n_states_ * n_actions_; }
  double gamma() const { return gamma_; }

  double transition(int s, int a, int next) const {
    return transition_[(static_cast<std::size_t>(s) * n_actions_ + a) * n_states_ + next];
  }
  std::span<const double> transition_row(int s, int a) const {
    return {transition_.data() + (static_cast<std::size_t>(s) * n_actions_ + a) * n_states_,
            static_cast<std::size_t>(n_states_)};
  }
  double reward(int s, int a) const { return reward_[static_cast<std::size_t>(s) * n_actions_ + a]; }
  std::span<const double> reward_table() const { return reward_; }
  std::span<const double> initial_dist() const { return initial_dist_; }
  std::span<const double> transition_table() const { return transition_; }

  // Same dynamics, different reward table.
  TabularMDP with_reward(std::vector<double> reward) const;

  nlohmann::json to_json() const;
  static TabularMDP from_json(const nlohmann::json& doc);

 private:
  int n_states_;
  int n_actions_;
  std::vector<double> transition_;
  std::vector<double> reward_;
  double gamma_;
  std::vector<double> initial_dist_;
};

// pi(a|s), stored row-major [s][a].
class StochasticPolicy {
 public:
  StochasticPolicy(int n_states, int n_actions, std::vector<double> probs);

  static StochasticPolicy uniform(int n_states, int n_actions);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double prob(int s, int a) const { return probs_[static_cast<std::size_t>(s) * n_actions_ + a]; }
  std::span<const double> row(int s) const {
    return {probs_.data() + static_cast<std::size_t>(s) * n_actions_,
            static_cast<std::size_t>(n_actions_)};
  }
  std::span<const double> table() const { return probs_; }

 private:
  int n_states_;
  int n_actions_;
  std::vector<double> probs_;
};

// p(s,a) = (1 - gamma) rho(s,a); a probability table over S x A, row-major [s][a].
class NormalizedOccupancy {
 public:
  NormalizedOccupancy(int n_states, int n_actions, std::vector<double> table);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double operator()(int s, int a) const { return table_[static_cast<std::size_t>(s) * n_actions_ + a]; }
  double at(std::size_t flat) const { return table_[flat]; }
  double state_marginal(int s) const;
  std::span<const double> table() const { return table_; }

 private:
  int n_states_;
  int n_actions_;
  std::vector<double> table_;
};

inline std::size_t flat_index(int n_actions, StateAction x) {
  return static_cast<std::size_t>(x.state) * n_actions + x.action;
}

void check_compatible(const TabularMDP& mdp, const StochasticPolicy& policy);

// State-to-state kernel under a policy: P_pi(s, s') = sum_a pi(a|s) P(s'|s,a).
Eigen::MatrixXd policy_transition_matrix(const TabularMDP& mdp, const StochasticPolicy& policy);

// Exact normalized occupancy from d = (1-gamma) p0 + gamma P_pi^T d.
NormalizedOccupancy compute_occupancy(const TabularMDP& mdp, const StochasticPolicy& policy);

// Inverse map pi(a|s) = p(s,a) / sum_b p(s,b); states with zero marginal get a uniform row.
StochasticPolicy policy_from_occupancy(const NormalizedOccupancy& occ);

// sum_{s,a} rho(s,a) R(s,a), with rho = p / (1 - gamma).
double expected_return(const TabularMDP& mdp, const StochasticPolicy& policy);

// Same as expected_return but for an arbitrary reward table [s][a].
double expected_return(const TabularMDP& mdp, const StochasticPolicy& policy,
                       std::span<const double> reward);

// Q^pi(s,a) for an arbitrary reward table, via an exact linear solve.
std::vector<double> evaluate_q(const TabularMDP& mdp, const StochasticPolicy& policy,
                               std::span<const double> reward);

struct ValueIterationResult {
  std::vector<double> q;  // [s][a]
  int iterations = 0;
};

inline constexpr double kValueIterationTolerance = 1e-10;
inline constexpr int kValueIterationCap = 100000;

ValueIterationResult value_iteration(const TabularMDP& mdp);

// Greedy policy when temperature == 0, otherwise softmax(Q*/temperature).
StochasticPolicy solve_optimal_policy(const TabularMDP& mdp, double temperature);

// i.i.d. draws from the normalized occupancy: each draw runs a trajectory that
// stops after every step with probability 1 - gamma and emits the last pair.
std::vector<StateAction> sample_rollouts(const TabularMDP& mdp, const StochasticPolicy& policy,
                                         std::size_t n_pairs, std::uint64_t rng_seed);

}  // namespace cil::env
