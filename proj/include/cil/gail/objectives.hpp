#pragma once

#include "cil/gail/batch.hpp"
#include "cil/nn/adam.hpp"
#include "cil/nn/approximator.hpp"

namespace cil::gail {

enum class Variant { Vanilla, Reweighted, IcGail };

// Which discriminator objective to ascend, with the constants it needs.
// lambda = max(tau, alpha_hat) for IcGail and is unused otherwise.
struct DiscObjective {
  Variant variant = Variant::Vanilla;
  double alpha_hat = 1.0;
  double tau = 1.0;
  double lambda = 1.0;

  static DiscObjective vanilla();
  static DiscObjective reweighted(double alpha_hat);
  static DiscObjective ic_gail(double alpha_hat, double tau = 0.7);
};

// Inputs for one discriminator update. Unused members stay empty:
//   Vanilla:    agent, demo
//   Reweighted: agent, confidence (weights are raw r; divided by alpha_hat here)
//   IcGail:     unlabeled, agent, confidence (weights are raw r)
struct DiscBatches {
  WeightedBatch agent;
  WeightedBatch demo;
  WeightedBatch confidence;
  WeightedBatch unlabeled;
};

// Every objective here has the form sum_i pos_i log D(x_i) + neg_i log(1 - D(x_i))
// with D = sigmoid(score). Rows with identical features are merged.
struct LogTerms {
  nn::Inputs x;
  Eigen::VectorXd pos;
  Eigen::VectorXd neg;
};

LogTerms build_terms(const DiscObjective& objective, const DiscBatches& batches);

double evaluate(const LogTerms& terms, const nn::Approximator& disc);
nn::ValueAndGradient value_and_grad(const LogTerms& terms, const nn::Approximator& disc);

// E_agent[log D] + E_demo[log(1 - D)].
double disc_loss_vanilla(const nn::Approximator& disc, const WeightedBatch& agent, const WeightedBatch& demo);

// E_agent[log D] + E_q[(r / alpha_hat) log(1 - D)].
double disc_loss_reweighted(const nn::Approximator& disc, const WeightedBatch& agent,
                            const WeightedBatch& confidence, double alpha_hat);

// E_p[log(1 - D)] + lambda E_agent[log D] + (1 - lambda) E_q[((1 - r) / (1 - alpha_hat)) log D].
// With lambda == alpha_hat the last coefficient reduces to (1 - r).
double disc_loss_icgail(const nn::Approximator& disc, const WeightedBatch& unlabeled, const WeightedBatch& agent,
                        const WeightedBatch& confidence, double lambda, double alpha_hat);

// One Adam ascent step on the selected objective. Returns the objective value
// at the parameters before the step. A non-finite value or gradient throws
// NumericError and leaves the discriminator untouched.
double disc_step(const DiscObjective& objective, nn::Approximator& disc, const DiscBatches& batches,
                 nn::OptimizerState& state);
double disc_step(const LogTerms& terms, nn::Approximator& disc, nn::OptimizerState& state);

// -log D(x), the reward handed to the policy learner.
double agent_reward(const nn::Approximator& disc, std::span<const double> x);
Eigen::VectorXd agent_reward(const nn::Approximator& disc, const nn::Inputs& x);

}  // namespace cil::gail
