#include "cil/sc/sc_risk.hpp"

#include <algorithm>
#include <cmath>

#include "cil/errors.hpp"

namespace cil::sc {

namespace {

void check_inputs(const ConfidenceDataset& dc, const UnlabeledDataset& du, const ScRiskConfig& cfg) {
  require(cfg.beta >= 0.0 && cfg.beta <= 1.0, "beta must lie in [0, 1]");
  require(dc.size() >= 1, "semi-conf risk needs at least one confidence record");
  require(!(cfg.beta > 0.0 && du.size() == 0), "beta > 0 needs a non-empty unlabeled set");
  if (du.size() > 0) require(du.x.cols() == dc.x.cols(), "labeled and unlabeled feature widths differ");
}

nn::Inputs stack(const ConfidenceDataset& dc, const UnlabeledDataset& du) {
  nn::Inputs all(dc.size() + du.size(), dc.x.cols());
  all.topRows(dc.size()) = dc.x;
  if (du.size() > 0) all.bottomRows(du.size()) = du.x;
  return all;
}

}  // namespace

double estimate_prior(const ConfidenceDataset& dc) {
  require(dc.size() >= 1, "cannot estimate the class prior from an empty confidence set");
  return dc.r.mean();
}

double beta_default(Eigen::Index n_c, Eigen::Index n_u) {
  require(n_c >= 0 && n_u >= 0 && n_c + n_u >= 1, "beta_default needs n_c + n_u >= 1");
  return static_cast<double>(n_u) / static_cast<double>(n_c + n_u);
}

ScRiskTerms sc_risk_terms(const Eigen::VectorXd& labeled_scores, const Eigen::VectorXd& r,
                          const Eigen::VectorXd& unlabeled_scores, const ScRiskConfig& cfg) {
  const auto n_c = labeled_scores.size();
  const auto n_u = unlabeled_scores.size();
  require(n_c >= 1 && r.size() == n_c, "semi-conf risk needs matching labeled scores and confidences");
  ScRiskTerms terms;
  double neg_c = 0.0;
  for (Eigen::Index i = 0; i < n_c; ++i) {
    const double z = labeled_scores(i);
    terms.positive += r(i) * nn::loss_value(cfg.loss, z);
    neg_c += (1.0 - cfg.beta - r(i)) * nn::loss_value(cfg.loss, -z);
  }
  terms.positive /= static_cast<double>(n_c);
  terms.negative = neg_c / static_cast<double>(n_c);
  if (cfg.beta > 0.0) {
    require(n_u >= 1, "beta > 0 needs a non-empty unlabeled set");
    double neg_u = 0.0;
    for (Eigen::Index i = 0; i < n_u; ++i) neg_u += nn::loss_value(cfg.loss, -unlabeled_scores(i));
    terms.negative += cfg.beta * neg_u / static_cast<double>(n_u);
  }
  return terms;
}

ScRiskTerms sc_risk_terms(const Eigen::VectorXd& labeled_scores, const Eigen::VectorXd& r,
                          const Eigen::VectorXd& labeled_mass, const Eigen::VectorXd& unlabeled_scores,
                          const Eigen::VectorXd& unlabeled_mass, const ScRiskConfig& cfg) {
  require(labeled_scores.size() >= 1 && r.size() == labeled_scores.size() &&
              labeled_mass.size() == labeled_scores.size(),
          "semi-conf risk needs matching labeled scores, confidences and masses");
  require(unlabeled_mass.size() == unlabeled_scores.size(), "unlabeled scores and masses differ in length");
  const double total_c = labeled_mass.sum();
  require(total_c > 0.0, "labeled masses must not all be zero");
  ScRiskTerms terms;
  for (Eigen::Index i = 0; i < labeled_scores.size(); ++i) {
    const double z = labeled_scores(i);
    const double w = labeled_mass(i) / total_c;
    terms.positive += w * r(i) * nn::loss_value(cfg.loss, z);
    terms.negative += w * (1.0 - cfg.beta - r(i)) * nn::loss_value(cfg.loss, -z);
  }
  if (cfg.beta > 0.0) {
    const double total_u = unlabeled_mass.sum();
    require(total_u > 0.0, "beta > 0 needs unlabeled mass");
    for (Eigen::Index i = 0; i < unlabeled_scores.size(); ++i) {
      terms.negative += cfg.beta * unlabeled_mass(i) / total_u * nn::loss_value(cfg.loss, -unlabeled_scores(i));
    }
  }
  return terms;
}

double sc_risk(const nn::Approximator& g, const ConfidenceDataset& dc, const UnlabeledDataset& du,
               const ScRiskConfig& cfg) {
  check_inputs(dc, du, cfg);
  const Eigen::VectorXd su = du.size() > 0 ? g.forward(du.x) : Eigen::VectorXd();
  const auto terms = sc_risk_terms(g.forward(dc.x), dc.r, su, cfg);
  return terms.positive + terms.negative;
}

double sc_risk_nonneg(const nn::Approximator& g, const ConfidenceDataset& dc, const UnlabeledDataset& du,
                      const ScRiskConfig& cfg) {
  check_inputs(dc, du, cfg);
  const Eigen::VectorXd su = du.size() > 0 ? g.forward(du.x) : Eigen::VectorXd();
  const auto terms = sc_risk_terms(g.forward(dc.x), dc.r, su, cfg);
  return terms.positive + std::max(0.0, terms.negative);
}

nn::ValueAndGradient sc_risk_value_and_grad(const nn::Approximator& g, const ConfidenceDataset& dc,
                                            const UnlabeledDataset& du, const ScRiskConfig& cfg, bool nonneg) {
  check_inputs(dc, du, cfg);
  const Eigen::Index n_c = dc.size();
  const Eigen::Index n_u = du.size();
  const Eigen::VectorXd r = dc.r;
  const nn::ScoreObjective objective = [&](const Eigen::VectorXd& scores) {
    const Eigen::VectorXd sc = scores.head(n_c);
    const Eigen::VectorXd su = scores.tail(n_u);
    const auto terms = sc_risk_terms(sc, r, su, cfg);
    const bool clamped = nonneg && terms.negative < 0.0;
    nn::ScoreObjectiveResult out;
    out.value = clamped ? terms.positive : terms.positive + terms.negative;
    out.dscores = Eigen::VectorXd::Zero(scores.size());
    for (Eigen::Index i = 0; i < n_c; ++i) {
      const double z = sc(i);
      double d = r(i) * nn::loss_derivative(cfg.loss, z);
      if (!clamped) d -= (1.0 - cfg.beta - r(i)) * nn::loss_derivative(cfg.loss, -z);
      out.dscores(i) = d / static_cast<double>(n_c);
    }
    if (!clamped && cfg.beta > 0.0) {
      for (Eigen::Index i = 0; i < n_u; ++i) {
        out.dscores(n_c + i) = -cfg.beta * nn::loss_derivative(cfg.loss, -su(i)) / static_cast<double>(n_u);
      }
    }
    return out;
  };
  return nn::grad(g, stack(dc, du), objective);
}

double beta_optimal(const ConfidenceDataset& dc, const UnlabeledDataset& du, const nn::Approximator& g,
                    nn::LossFn loss) {
  const Eigen::Index n_c = dc.size();
  const Eigen::Index n_u = du.size();
  require(n_c >= 2, "beta_optimal needs at least two confidence records");
  if (n_u == 0) return 0.0;

  const Eigen::VectorXd sc = g.forward(dc.x);
  const Eigen::VectorXd su = g.forward(du.x);
  Eigen::VectorXd a(n_c);
  Eigen::VectorXd b(n_c);
  for (Eigen::Index i = 0; i < n_c; ++i) {
    a(i) = dc.r(i) * (nn::loss_value(loss, sc(i)) - nn::loss_value(loss, -sc(i)));
    b(i) = nn::loss_value(loss, -sc(i));
  }
  const double cov_ab = ((a.array() - a.mean()) * (b.array() - b.mean())).sum() / static_cast<double>(n_c - 1);
  const double sigma_cov = cov_ab / static_cast<double>(n_c);

  Eigen::VectorXd pooled(n_c + n_u);
  pooled.head(n_c) = b;
  for (Eigen::Index i = 0; i < n_u; ++i) pooled(n_c + i) = nn::loss_value(loss, -su(i));
  const double variance = (pooled.array() - pooled.mean()).square().sum() / static_cast<double>(pooled.size() - 1);

  const double base = beta_default(n_c, n_u);
  if (!(variance > 1e-300)) return base;
  const double nc = static_cast<double>(n_c);
  const double nu = static_cast<double>(n_u);
  const double beta = base + (sigma_cov / variance) * (nc * nu / (nc + nu));
  return std::clamp(beta, 0.0, 1.0);
}

}  // namespace cil::sc
