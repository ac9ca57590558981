#pragma once

#include <string>

#include "cil/nn/approximator.hpp"

namespace cil::gail {

enum class Source { Agent, Unlabeled, Confidence, Demo };

// A sample (or population) of feature rows. Each record carries
//   weight: the per-record value the objective consumes (1 for plain samples,
//           the confidence r for Source::Confidence);
//   mass:   how much of the expectation the record accounts for (1 per draw,
//           or p(x) for an exact population table).
// Expectations are sum_i mass_i * f(x_i, weight_i) / sum_i mass_i.
struct WeightedBatch {
  nn::Inputs x;
  Eigen::VectorXd weight;
  Eigen::VectorXd mass;
  Source source = Source::Demo;

  WeightedBatch() = default;
  WeightedBatch(nn::Inputs features, Eigen::VectorXd weights, Eigen::VectorXd masses, Source src);

  // Unit weight and unit mass per row.
  static WeightedBatch samples(nn::Inputs features, Source src);
  // Confidence records with unit mass.
  static WeightedBatch confidence(nn::Inputs features, Eigen::VectorXd r);

  Eigen::Index size() const { return x.rows(); }
  bool empty() const { return x.rows() == 0; }
  double total_mass() const { return mass.sum(); }

  // Merges rows with identical features and weight, summing their mass.
  // Expectations are unchanged.
  WeightedBatch compacted() const;

  // Concatenates two batches; the result's expectations are mass-weighted.
  static WeightedBatch concat(const WeightedBatch& a, const WeightedBatch& b, Source src);
};

std::string source_name(Source source);

}  // namespace cil::gail
