#pragma once

#include <string>
#include <vector>

#include "cil/env/tabular_mdp.hpp"

namespace cil::env {

// Four-action gridworld. Actions: 0 up, 1 down, 2 left, 3 right. Moves into a
// wall leave the agent in place. With probability `slip` the intended move is
// replaced by a uniformly random one.
struct GridworldSpec {
  int rows = 5;
  int cols = 5;
  double slip = 0.1;
  double gamma = 0.95;
  int goal_row = 4;
  int goal_col = 4;
  double goal_reward = 1.0;
  // Cells whose every action costs `trap_reward`; empty for a plain grid.
  std::vector<std::pair<int, int>> traps;
  double trap_reward = -1.0;
  // "corner" starts at (0,0); "uniform" spreads p0 over all non-goal cells.
  std::string start = "corner";
};

TabularMDP make_gridworld(const GridworldSpec& spec);

// Feature encoding of a state-action pair used by classifiers and
// discriminators: one-hot state followed by one-hot action.
class FeatureMap {
 public:
  FeatureMap(int n_states, int n_actions) : n_states_(n_states), n_actions_(n_actions) {}

  int dim() const { return n_states_ + n_actions_; }
  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }

  std::vector<double> encode(StateAction x) const;
  Eigen::MatrixXd encode(const std::vector<StateAction>& xs) const;
  // Inverse of encode; throws ConfigError on a vector that is not a valid code.
  StateAction decode(std::span<const double> features) const;
  // One row per (s,a) pair, in flat [s][a] order.
  Eigen::MatrixXd all_pairs() const;

 private:
  int n_states_;
  int n_actions_;
};

}  // namespace cil::env
