#include "cil/policy/soft_pi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cil/errors.hpp"

namespace cil::policy {

AgentState AgentState::initial(const env::TabularMDP& mdp, double temperature) {
  require(temperature > 0.0, "policy step temperature must be positive");
  return {env::StochasticPolicy::uniform(mdp.n_states(), mdp.n_actions()), 0, temperature, 0.999, 1e-6};
}

AgentState policy_improve(const env::TabularMDP& mdp, const AgentState& agent, std::span<const double> reward) {
  env::check_compatible(mdp, agent.policy);
  require(reward.size() == static_cast<std::size_t>(mdp.n_pairs()), "reward table size differs from |S||A|");
  require(agent.temperature > 0.0, "policy step temperature must be positive");
  require(agent.min_prob >= 0.0 && agent.min_prob * mdp.n_actions() < 1.0, "invalid action-probability floor");
  for (double r : reward) {
    if (!std::isfinite(r)) throw NumericError("policy_improve received a non-finite reward");
  }
  const int n_s = mdp.n_states();
  const int n_a = mdp.n_actions();
  const std::vector<double> q = env::evaluate_q(mdp, agent.policy, reward);
  const double inv_eta = std::isinf(agent.temperature) ? 0.0 : 1.0 / agent.temperature;

  std::vector<double> next(static_cast<std::size_t>(n_s) * n_a);
  std::vector<double> logits(static_cast<std::size_t>(n_a));
  for (int s = 0; s < n_s; ++s) {
    double top = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n_a; ++a) {
      const double pi = agent.policy.prob(s, a);
      logits[a] = pi > 0.0 ? std::log(pi) + q[s * n_a + a] * inv_eta : -std::numeric_limits<double>::infinity();
      top = std::max(top, logits[a]);
    }
    double total = 0.0;
    for (int a = 0; a < n_a; ++a) {
      logits[a] = std::exp(logits[a] - top);
      total += logits[a];
    }
    for (int a = 0; a < n_a; ++a) logits[a] /= total;
    // Pin floored actions at min_prob and rescale the rest into the remaining
    // mass; rescaling can push another action under, so repeat.
    std::vector<bool> pinned(static_cast<std::size_t>(n_a), false);
    for (bool changed = agent.min_prob > 0.0; changed;) {
      changed = false;
      double free_mass = 0.0;
      int n_pinned = 0;
      for (int a = 0; a < n_a; ++a) {
        if (pinned[a]) {
          ++n_pinned;
        } else {
          free_mass += logits[a];
        }
      }
      const double scale = (1.0 - n_pinned * agent.min_prob) / free_mass;
      for (int a = 0; a < n_a; ++a) {
        if (pinned[a]) continue;
        if (logits[a] * scale < agent.min_prob) {
          pinned[a] = true;
          changed = true;
        }
      }
      if (!changed) {
        for (int a = 0; a < n_a; ++a) logits[a] = pinned[a] ? agent.min_prob : logits[a] * scale;
      }
    }
    for (int a = 0; a < n_a; ++a) next[s * n_a + a] = logits[a];
  }

  AgentState out = agent;
  out.policy = env::StochasticPolicy(n_s, n_a, std::move(next));
  out.iteration = agent.iteration + 1;
  out.temperature = agent.temperature * agent.anneal;
  return out;
}

AgentState policy_improve(const env::TabularMDP& mdp, const AgentState& agent,
                          const std::function<double(int, int)>& reward_fn) {
  std::vector<double> table(static_cast<std::size_t>(mdp.n_pairs()));
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) table[s * mdp.n_actions() + a] = reward_fn(s, a);
  }
  return policy_improve(mdp, agent, table);
}

env::NormalizedOccupancy agent_occupancy(const env::TabularMDP& mdp, const AgentState& agent) {
  return env::compute_occupancy(mdp, agent.policy);
}

}  // namespace cil::policy
