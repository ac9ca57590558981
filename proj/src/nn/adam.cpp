#include "cil/nn/adam.hpp"

#include <cmath>

#include "cil/errors.hpp"

namespace cil::nn {

OptimizerState::OptimizerState(std::size_t n_params, double lr)
    : learning_rate(lr),
      first_moment(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_params))),
      second_moment(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_params))) {}

void optimizer_step(OptimizerState& state, Eigen::VectorXd& params, const Eigen::VectorXd& gradient) {
  require(params.size() == gradient.size(), "gradient and parameter shapes differ");
  if (state.first_moment.size() == 0) {
    state.first_moment = Eigen::VectorXd::Zero(params.size());
    state.second_moment = Eigen::VectorXd::Zero(params.size());
  }
  require(state.first_moment.size() == params.size(), "optimizer state and parameter shapes differ");
  if (!gradient.allFinite()) throw NumericError("non-finite gradient; optimizer step skipped");

  state.step += 1;
  state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * gradient;
  state.second_moment = state.beta2 * state.second_moment + (1.0 - state.beta2) * gradient.cwiseProduct(gradient);
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -= state.learning_rate * (state.first_moment.array() / c1) /
                    ((state.second_moment.array() / c2).sqrt() + state.epsilon);
}

}  // namespace cil::nn
