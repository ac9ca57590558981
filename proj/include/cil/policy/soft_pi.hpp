#pragma once

#include <functional>
#include <span>

#include "cil/env/tabular_mdp.hpp"

namespace cil::policy {

struct AgentState {
  env::StochasticPolicy policy;
  int iteration = 0;
  // Step temperature eta; larger means a smaller step.
  double temperature = 1.0;
  // temperature *= anneal after every improvement step.
  double anneal = 0.999;
  // Every action keeps at least this probability; 0 disables the floor.
  double min_prob = 1e-6;

  static AgentState initial(const env::TabularMDP& mdp, double temperature = 1.0);
};

// One soft policy-iteration step: exact Q under the current policy for the
// given reward table [s][a], then pi'(a|s) proportional to pi(a|s) exp(Q(s,a)/eta).
AgentState policy_improve(const env::TabularMDP& mdp, const AgentState& agent, std::span<const double> reward);
AgentState policy_improve(const env::TabularMDP& mdp, const AgentState& agent,
                          const std::function<double(int, int)>& reward_fn);

env::NormalizedOccupancy agent_occupancy(const env::TabularMDP& mdp, const AgentState& agent);

}  // namespace cil::policy
