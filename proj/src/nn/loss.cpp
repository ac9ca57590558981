#include "cil/nn/loss.hpp"

#include "cil/errors.hpp"

namespace cil::nn {

LossFn parse_loss(const std::string& name) {
  if (name == "logistic") return LossFn::Logistic;
  if (name == "squared") return LossFn::Squared;
  throw ConfigError("unknown loss: " + name);
}

std::string loss_name(LossFn loss) { return loss == LossFn::Logistic ? "logistic" : "squared"; }

}  // namespace cil::nn
