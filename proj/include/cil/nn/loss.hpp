#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace cil::nn {

// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Probability link p(y=1|x) = 1 / (1 + exp(-score)). The result is clipped to
// the open interval (0, 1) at the nearest representable doubles.
inline double sigmoid_link(double score) {
  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  double p;
  if (score >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-score));
  } else {
    const double e = std::exp(score);
    p = e / (1.0 + e);
  }
  if (p < kLow) return kLow;
  if (p > kHigh) return kHigh;
  return p;
}

// Unclipped sigmoid used inside derivatives.
inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log sigmoid(z) and log(1 - sigmoid(z)).
inline double log_sigmoid(double z) { return -softplus(-z); }
inline double log_one_minus_sigmoid(double z) { return -softplus(z); }

enum class LossFn { Logistic, Squared };

// logistic: log(1 + exp(-z)); squared: (1 - z)^2 / 4.
inline double loss_value(LossFn loss, double z) {
  switch (loss) {
    case LossFn::Logistic:
      return softplus(-z);
    case LossFn::Squared:
      return 0.25 * (1.0 - z) * (1.0 - z);
  }
  return 0.0;
}

inline double loss_derivative(LossFn loss, double z) {
  switch (loss) {
    case LossFn::Logistic:
      return -sigmoid(-z);
    case LossFn::Squared:
      return -0.5 * (1.0 - z);
  }
  return 0.0;
}

// Inverse link: class-posterior estimate from a score minimizing the loss.
inline double inverse_link(LossFn loss, double z) {
  switch (loss) {
    case LossFn::Logistic:
      return sigmoid_link(z);
    case LossFn::Squared: {
      const double p = 0.5 * (z + 1.0);
      return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
    }
  }
  return 0.5;
}

LossFn parse_loss(const std::string& name);
std::string loss_name(LossFn loss);

}  // namespace cil::nn
