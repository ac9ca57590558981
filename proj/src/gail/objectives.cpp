#include "cil/gail/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "cil/errors.hpp"
#include "cil/nn/loss.hpp"

namespace cil::gail {

namespace {

class TermBuilder {
 public:
  // Adds coefficient * mass_i / total_mass * transform(weight_i) to pos or neg.
  template <typename Transform>
  void add(const WeightedBatch& batch, double coefficient, bool on_log_d, Transform transform) {
    require(!batch.empty(), "discriminator objective received an empty " + source_name(batch.source) + " batch");
    const double total = batch.total_mass();
    require(total > 0.0, "discriminator objective received a " + source_name(batch.source) + " batch with zero mass");
    if (width_ < 0) width_ = static_cast<int>(batch.x.cols());
    require(batch.x.cols() == width_, "discriminator batches have differing feature widths");
    for (Eigen::Index i = 0; i < batch.size(); ++i) {
      const double c = coefficient * batch.mass(i) / total * transform(batch.weight(i));
      std::vector<double> key(batch.x.row(i).data(), batch.x.row(i).data() + batch.x.cols());
      const auto [it, inserted] = slot_.emplace(std::move(key), rows_.size());
      if (inserted) {
        rows_.push_back(&batch.x);
        row_index_.push_back(i);
        pos_.push_back(0.0);
        neg_.push_back(0.0);
      }
      (on_log_d ? pos_ : neg_)[it->second] += c;
    }
  }

  LogTerms finish() const {
    const auto n = static_cast<Eigen::Index>(rows_.size());
    LogTerms terms{nn::Inputs(n, std::max(width_, 0)), Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      terms.x.row(k) = rows_[ks]->row(row_index_[ks]);
      terms.pos(k) = pos_[ks];
      terms.neg(k) = neg_[ks];
    }
    return terms;
  }

 private:
  int width_ = -1;
  std::map<std::vector<double>, std::size_t> slot_;
  std::vector<const nn::Inputs*> rows_;
  std::vector<Eigen::Index> row_index_;
  std::vector<double> pos_;
  std::vector<double> neg_;
};

const auto kUnit = [](double) { return 1.0; };

}  // namespace

DiscObjective DiscObjective::vanilla() { return {Variant::Vanilla, 1.0, 1.0, 1.0}; }

DiscObjective DiscObjective::reweighted(double alpha_hat) {
  require(alpha_hat > 0.0 && alpha_hat <= 1.0, "alpha_hat must lie in (0, 1]");
  return {Variant::Reweighted, alpha_hat, 1.0, 1.0};
}

DiscObjective DiscObjective::ic_gail(double alpha_hat, double tau) {
  require(alpha_hat >= 0.0 && alpha_hat <= 1.0, "alpha_hat must lie in [0, 1]");
  require(tau > 0.0 && tau <= 1.0, "tau must lie in (0, 1]");
  return {Variant::IcGail, alpha_hat, tau, std::max(tau, alpha_hat)};
}

LogTerms build_terms(const DiscObjective& objective, const DiscBatches& batches) {
  TermBuilder builder;
  switch (objective.variant) {
    case Variant::Vanilla:
      builder.add(batches.agent, 1.0, true, kUnit);
      builder.add(batches.demo, 1.0, false, kUnit);
      break;
    case Variant::Reweighted: {
      require(objective.alpha_hat > 0.0, "alpha_hat must be positive");
      const double alpha = objective.alpha_hat;
      builder.add(batches.agent, 1.0, true, kUnit);
      builder.add(batches.confidence, 1.0, false, [alpha](double r) { return r / alpha; });
      break;
    }
    case Variant::IcGail: {
      const double lambda = objective.lambda;
      const double alpha = objective.alpha_hat;
      require(lambda > 0.0 && lambda <= 1.0, "lambda must lie in (0, 1]");
      builder.add(batches.unlabeled, 1.0, false, kUnit);
      builder.add(batches.agent, lambda, true, kUnit);
      if (lambda < 1.0) {
        require(alpha < 1.0, "alpha_hat = 1 with lambda < 1 leaves the confidence coefficient undefined");
        builder.add(batches.confidence, 1.0 - lambda, true, [alpha](double r) { return (1.0 - r) / (1.0 - alpha); });
      }
      break;
    }
  }
  return builder.finish();
}

double evaluate(const LogTerms& terms, const nn::Approximator& disc) {
  const Eigen::VectorXd z = disc.forward(terms.x);
  double value = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (terms.pos(i) != 0.0) value += terms.pos(i) * nn::log_sigmoid(z(i));
    if (terms.neg(i) != 0.0) value += terms.neg(i) * nn::log_one_minus_sigmoid(z(i));
  }
  return value;
}

nn::ValueAndGradient value_and_grad(const LogTerms& terms, const nn::Approximator& disc) {
  const nn::ScoreObjective objective = [&terms](const Eigen::VectorXd& z) {
    nn::ScoreObjectiveResult out;
    out.dscores.resize(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      if (terms.pos(i) != 0.0) out.value += terms.pos(i) * nn::log_sigmoid(z(i));
      if (terms.neg(i) != 0.0) out.value += terms.neg(i) * nn::log_one_minus_sigmoid(z(i));
      // d/dz log sigmoid(z) = sigmoid(-z); d/dz log(1 - sigmoid(z)) = -sigmoid(z).
      out.dscores(i) = terms.pos(i) * nn::sigmoid(-z(i)) - terms.neg(i) * nn::sigmoid(z(i));
    }
    return out;
  };
  return nn::grad(disc, terms.x, objective);
}

double disc_loss_vanilla(const nn::Approximator& disc, const WeightedBatch& agent, const WeightedBatch& demo) {
  return evaluate(build_terms(DiscObjective::vanilla(), {agent, demo, {}, {}}), disc);
}

double disc_loss_reweighted(const nn::Approximator& disc, const WeightedBatch& agent,
                            const WeightedBatch& confidence, double alpha_hat) {
  return evaluate(build_terms(DiscObjective::reweighted(alpha_hat), {agent, {}, confidence, {}}), disc);
}

double disc_loss_icgail(const nn::Approximator& disc, const WeightedBatch& unlabeled, const WeightedBatch& agent,
                        const WeightedBatch& confidence, double lambda, double alpha_hat) {
  require(lambda > 0.0 && lambda <= 1.0, "lambda must lie in (0, 1]");
  require(alpha_hat >= 0.0 && alpha_hat <= 1.0, "alpha_hat must lie in [0, 1]");
  const DiscObjective objective{Variant::IcGail, alpha_hat, lambda, lambda};
  return evaluate(build_terms(objective, {agent, {}, confidence, unlabeled}), disc);
}

double disc_step(const LogTerms& terms, nn::Approximator& disc, nn::OptimizerState& state) {
  const auto vg = value_and_grad(terms, disc);
  if (!std::isfinite(vg.value)) throw NumericError("discriminator objective is not finite; step aborted");
  // Ascent on the objective is descent on its negation.
  nn::optimizer_step(state, disc.mutable_parameters(), -vg.gradient);
  return vg.value;
}

double disc_step(const DiscObjective& objective, nn::Approximator& disc, const DiscBatches& batches,
                 nn::OptimizerState& state) {
  return disc_step(build_terms(objective, batches), disc, state);
}

double agent_reward(const nn::Approximator& disc, std::span<const double> x) {
  return nn::softplus(-disc.forward(x));
}

Eigen::VectorXd agent_reward(const nn::Approximator& disc, const nn::Inputs& x) {
  return disc.forward(x).unaryExpr([](double z) { return nn::softplus(-z); });
}

}  // namespace cil::gail
