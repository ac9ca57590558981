#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace cil::nn {

struct OptimizerState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;

  explicit OptimizerState(std::size_t n_params = 0, double lr = 1e-3);
};

// One Adam descent step on params. Throws NumericError and leaves both params
// and state untouched when the gradient has a non-finite entry.
void optimizer_step(OptimizerState& state, Eigen::VectorXd& params, const Eigen::VectorXd& gradient);

}  // namespace cil::nn
