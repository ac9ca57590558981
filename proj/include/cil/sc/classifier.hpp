#pragma once

#include <cstdint>

#include "cil/nn/approximator.hpp"
#include "cil/sc/datasets.hpp"
#include "cil/sc/sc_risk.hpp"

namespace cil::sc {

struct ClassifierTrainOptions {
  int epochs = 2000;
  int batch_size = 256;
  // Stop when the held-out risk has not improved for this many epochs.
  int patience = 50;
  double holdout_fraction = 0.1;
  double learning_rate = 1e-3;
};

// Minimizes the semi-conf risk (clamped when cfg.use_nonneg) with mini-batch
// Adam and returns the parameters that scored best on the holdout split.
nn::Approximator train_classifier(const ConfidenceDataset& dc, const UnlabeledDataset& du,
                                  const ScRiskConfig& cfg, const ClassifierTrainOptions& options,
                                  std::uint64_t rng_seed);

nn::Approximator train_classifier(const ConfidenceDataset& dc, const UnlabeledDataset& du,
                                  const ScRiskConfig& cfg, int epochs, std::uint64_t rng_seed);

// sigmoid_link(g(x)) per row.
Eigen::VectorXd predict_confidence(const nn::Approximator& g, const nn::Inputs& x);

}  // namespace cil::sc
