#include "cil/env/gridworld.hpp"

#include <algorithm>

#include "cil/errors.hpp"

namespace cil::env {

namespace {

constexpr int kMoves[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};

}  // namespace

TabularMDP make_gridworld(const GridworldSpec& spec) {
  require(spec.rows > 0 && spec.cols > 0, "gridworld needs positive dimensions");
  require(spec.slip >= 0.0 && spec.slip <= 1.0, "slip must lie in [0, 1]");
  require(spec.goal_row >= 0 && spec.goal_row < spec.rows && spec.goal_col >= 0 && spec.goal_col < spec.cols,
          "goal lies outside the grid");
  const int n = spec.rows * spec.cols;
  const int na = 4;
  const auto cell = [&](int r, int c) { return r * spec.cols + c; };
  const int goal = cell(spec.goal_row, spec.goal_col);

  std::vector<double> transition(static_cast<std::size_t>(n) * na * n, 0.0);
  std::vector<double> reward(static_cast<std::size_t>(n) * na, 0.0);
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const int s = cell(r, c);
      for (int a = 0; a < na; ++a) {
        double* row = transition.data() + (static_cast<std::size_t>(s) * na + a) * n;
        for (int m = 0; m < na; ++m) {
          const double pm = (m == a ? 1.0 - spec.slip : 0.0) + spec.slip / na;
          const int nr = std::clamp(r + kMoves[m][0], 0, spec.rows - 1);
          const int nc = std::clamp(c + kMoves[m][1], 0, spec.cols - 1);
          row[cell(nr, nc)] += pm;
        }
        if (s == goal) reward[static_cast<std::size_t>(s) * na + a] = spec.goal_reward;
      }
    }
  }
  for (const auto& [tr, tc] : spec.traps) {
    require(tr >= 0 && tr < spec.rows && tc >= 0 && tc < spec.cols, "trap lies outside the grid");
    for (int a = 0; a < na; ++a) reward[static_cast<std::size_t>(cell(tr, tc)) * na + a] = spec.trap_reward;
  }

  std::vector<double> initial(n, 0.0);
  if (spec.start == "corner") {
    initial[0] = 1.0;
  } else if (spec.start == "uniform") {
    for (int s = 0; s < n; ++s) initial[s] = s == goal ? 0.0 : 1.0 / (n - 1);
    if (n == 1) initial[0] = 1.0;
  } else {
    throw ConfigError("unknown gridworld start mode: " + spec.start);
  }
  return TabularMDP(n, na, std::move(transition), std::move(reward), spec.gamma, std::move(initial));
}

std::vector<double> FeatureMap::encode(StateAction x) const {
  require(x.state >= 0 && x.state < n_states_ && x.action >= 0 && x.action < n_actions_,
          "state-action pair out of range");
  std::vector<double> out(static_cast<std::size_t>(dim()), 0.0);
  out[x.state] = 1.0;
  out[n_states_ + x.action] = 1.0;
  return out;
}

Eigen::MatrixXd FeatureMap::encode(const std::vector<StateAction>& xs) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(xs.size()), dim());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto& x = xs[i];
    require(x.state >= 0 && x.state < n_states_ && x.action >= 0 && x.action < n_actions_,
            "state-action pair out of range");
    out(static_cast<Eigen::Index>(i), x.state) = 1.0;
    out(static_cast<Eigen::Index>(i), n_states_ + x.action) = 1.0;
  }
  return out;
}

StateAction FeatureMap::decode(std::span<const double> features) const {
  require(features.size() == static_cast<std::size_t>(dim()), "feature vector has wrong dimension");
  int state = -1;
  int action = -1;
  for (int i = 0; i < dim(); ++i) {
    if (features[i] == 1.0) {
      if (i < n_states_) {
        require(state < 0, "feature vector encodes two states");
        state = i;
      } else {
        require(action < 0, "feature vector encodes two actions");
        action = i - n_states_;
      }
    } else {
      require(features[i] == 0.0, "feature vector is not a one-hot code");
    }
  }
  require(state >= 0 && action >= 0, "feature vector is not a one-hot code");
  return {state, action};
}

Eigen::MatrixXd FeatureMap::all_pairs() const {
  std::vector<StateAction> xs;
  xs.reserve(static_cast<std::size_t>(n_states_) * n_actions_);
  for (int s = 0; s < n_states_; ++s) {
    for (int a = 0; a < n_actions_; ++a) xs.push_back({s, a});
  }
  return encode(xs);
}

}  // namespace cil::env
