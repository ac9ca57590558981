#pragma once

#include "cil/nn/approximator.hpp"
#include "cil/nn/loss.hpp"
#include "cil/sc/datasets.hpp"

namespace cil::sc {

struct ScRiskConfig {
  nn::LossFn loss = nn::LossFn::Logistic;
  double beta = 0.0;
  bool use_nonneg = true;
};

// Split of the empirical semi-conf risk into the part that is non-negative by
// construction and the part that can go negative on finite samples:
//   positive = mean_c r l(g)
//   negative = mean_c (1 - beta - r) l(-g) + beta mean_u l(-g)
// The plain estimator is positive + negative.
struct ScRiskTerms {
  double positive = 0.0;
  double negative = 0.0;
};

double estimate_prior(const ConfidenceDataset& dc);

double beta_default(Eigen::Index n_c, Eigen::Index n_u);

ScRiskTerms sc_risk_terms(const Eigen::VectorXd& labeled_scores, const Eigen::VectorXd& r,
                          const Eigen::VectorXd& unlabeled_scores, const ScRiskConfig& cfg);

// Mass-weighted form: labeled record i counts labeled_mass(i) / sum(labeled_mass),
// likewise for unlabeled. With probability tables as masses this is the
// population risk.
ScRiskTerms sc_risk_terms(const Eigen::VectorXd& labeled_scores, const Eigen::VectorXd& r,
                          const Eigen::VectorXd& labeled_mass, const Eigen::VectorXd& unlabeled_scores,
                          const Eigen::VectorXd& unlabeled_mass, const ScRiskConfig& cfg);

double sc_risk(const nn::Approximator& g, const ConfidenceDataset& dc, const UnlabeledDataset& du,
               const ScRiskConfig& cfg);

// positive + max(0, negative); never below zero.
double sc_risk_nonneg(const nn::Approximator& g, const ConfidenceDataset& dc, const UnlabeledDataset& du,
                      const ScRiskConfig& cfg);

// Value and parameter gradient of the plain (nonneg = false) or clamped
// (nonneg = true) estimator. With the clamp active the gradient is that of the
// positive part alone.
nn::ValueAndGradient sc_risk_value_and_grad(const nn::Approximator& g, const ConfidenceDataset& dc,
                                            const UnlabeledDataset& du, const ScRiskConfig& cfg, bool nonneg);

// Variance-minimizing combination weight, clipped to [0, 1]. The covariance
// between the two labeled-sample means is estimated as the sample covariance of
// the per-record terms divided by n_c; Var(l(-g)) is pooled over D_c and D_u.
// Falls back to beta_default when that variance vanishes.
double beta_optimal(const ConfidenceDataset& dc, const UnlabeledDataset& du, const nn::Approximator& g,
                    nn::LossFn loss = nn::LossFn::Logistic);

}  // namespace cil::sc
