// Acceptance checks. Usage: acceptance [criterion numbers...]; no arguments runs all.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cil/bench/experiment.hpp"
#include "cil/bench/report.hpp"
#include "cil/env/gridworld.hpp"
#include "cil/env/tabular_mdp.hpp"
#include "cil/gail/objectives.hpp"
#include "cil/nn/approximator.hpp"
#include "cil/rng.hpp"
#include "cil/sc/sc_risk.hpp"
#include "oracles.hpp"

#ifndef CIL_BENCH_EXE
#error "CIL_BENCH_EXE must name the cil-bench executable"
#endif

using namespace cil;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Eigen::VectorXd vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// A two-class mixture on k one-hot cells with exact posteriors.
struct Support {
  int k = 0;
  double alpha = 0.0;
  std::vector<double> p_opt, p_non, p, r;
  nn::Inputs x;
};

Support make_support(int k, double alpha, std::uint64_t seed) {
  Support s;
  s.k = k;
  s.alpha = alpha;
  s.p_opt = oracle::random_simplex(k, seed);
  s.p_non = oracle::random_simplex(k, seed + 1);
  for (int i = 0; i < k; ++i) {
    s.p.push_back(alpha * s.p_opt[i] + (1 - alpha) * s.p_non[i]);
    s.r.push_back(alpha * s.p_opt[i] / s.p.back());
  }
  s.x = nn::Inputs::Identity(k, k);
  return s;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> sigmoid_all(const std::vector<double>& z) {
  std::vector<double> out;
  for (double v : z) out.push_back(1.0 / (1.0 + std::exp(-v)));
  return out;
}

// Draws n cell indices from p.
std::vector<std::size_t> draw_cells(const std::vector<double>& p, int n, Rng& rng) {
  std::vector<std::size_t> out(static_cast<std::size_t>(n));
  for (auto& c : out) c = sample_categorical(p, rng);
  return out;
}

// ---------------------------------------------------------------------------

Outcome risk_equivalence() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = make_support(20, 0.2 + 0.15 * static_cast<double>(seed), 100 + seed);
    const auto g = nn::Approximator::standard(20, seed);
    const Eigen::VectorXd z = g.forward(s.x);
    for (auto loss : {nn::LossFn::Logistic, nn::LossFn::Squared}) {
      const double pn = oracle::pn_risk(to_std(z), s.p_opt, s.p_non, s.alpha, loss);
      for (double beta : {0.0, 0.5, 1.0}) {
        const auto t = sc::sc_risk_terms(z, vec(s.r), vec(s.p), z, vec(s.p), {loss, beta, false});
        worst = std::max(worst, std::abs(t.positive + t.negative - pn));
      }
    }
  }
  return {worst < 1e-12, fmt("max |SC - PN| = %.3g", worst)};
}

Outcome unbiasedness() {
  const auto s = make_support(20, 1.0 / 3.0, 7);
  const auto g = nn::Approximator::standard(20, 8);
  const Eigen::VectorXd z = g.forward(s.x);
  const double pn = oracle::pn_risk(to_std(z), s.p_opt, s.p_non, s.alpha, nn::LossFn::Logistic);
  const int n_c = 50, n_u = 200, reps = 1000;
  const sc::ScRiskConfig cfg{nn::LossFn::Logistic, sc::beta_default(n_c, n_u), false};
  Rng rng(derive_seed(9, 0));
  std::vector<double> est;
  for (int rep = 0; rep < reps; ++rep) {
    const auto c = draw_cells(s.p, n_c, rng);
    const auto u = draw_cells(s.p, n_u, rng);
    Eigen::VectorXd zc(n_c), rc(n_c), zu(n_u);
    for (int i = 0; i < n_c; ++i) {
      zc(i) = z(static_cast<Eigen::Index>(c[i]));
      rc(i) = s.r[c[i]];
    }
    for (int i = 0; i < n_u; ++i) zu(i) = z(static_cast<Eigen::Index>(u[i]));
    const auto t = sc::sc_risk_terms(zc, rc, zu, cfg);
    est.push_back(t.positive + t.negative);
  }
  double mean = 0.0;
  for (double v : est) mean += v / reps;
  double ss = 0.0;
  for (double v : est) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / (reps - 1) / reps);
  const double zscore = (mean - pn) / se;
  return {std::abs(zscore) <= 3.0, fmt2("mean - PN = %.3g (%.2f SE)", mean - pn, zscore)};
}

Outcome variance_minimizer() {
  const auto s = make_support(20, 1.0 / 3.0, 21);
  // Scores roughly aligned with the posterior, as a trained classifier's would be.
  const auto net = nn::Approximator::standard(20, 22);
  Eigen::VectorXd z = net.forward(s.x);
  for (int i = 0; i < 20; ++i) z(i) += 4.0 * (s.r[static_cast<std::size_t>(i)] - 0.5);
  const auto loss = nn::LossFn::Logistic;
  const int n_c = 50, n_u = 200, reps = 10000;

  // Population optimum of Var(R_hat) over beta, where
  // R_hat = mean_c a + (1 - beta) mean_c b + beta mean_u b, a = r (l(g) - l(-g)), b = l(-g).
  double ea = 0, eb = 0, eab = 0, ebb = 0;
  for (int i = 0; i < 20; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double a = s.r[ui] * (nn::loss_value(loss, z(i)) - nn::loss_value(loss, -z(i)));
    const double b = nn::loss_value(loss, -z(i));
    ea += s.p[ui] * a;
    eb += s.p[ui] * b;
    eab += s.p[ui] * a * b;
    ebb += s.p[ui] * b * b;
  }
  const double cov = eab - ea * eb;
  const double var_b = ebb - eb * eb;
  const double beta_star =
      std::clamp(static_cast<double>(n_u) / (n_c + n_u) * (1.0 + cov / var_b), 0.0, 1.0);

  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.1 * i);
  std::vector<double> sum(grid.size(), 0.0), sumsq(grid.size(), 0.0);
  double library_beta = 0.0;
  Rng rng(derive_seed(23, 0));
  const auto g_cells = [&](const std::vector<std::size_t>& cells) {
    nn::Inputs x = nn::Inputs::Zero(static_cast<Eigen::Index>(cells.size()), 20);
    for (std::size_t i = 0; i < cells.size(); ++i) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cells[i])) = 1.0;
    return x;
  };
  for (int rep = 0; rep < reps; ++rep) {
    const auto c = draw_cells(s.p, n_c, rng);
    const auto u = draw_cells(s.p, n_u, rng);
    Eigen::VectorXd zc(n_c), rc(n_c), zu(n_u);
    for (int i = 0; i < n_c; ++i) {
      zc(i) = z(static_cast<Eigen::Index>(c[i]));
      rc(i) = s.r[c[i]];
    }
    for (int i = 0; i < n_u; ++i) zu(i) = z(static_cast<Eigen::Index>(u[i]));
    // Common random numbers: every beta sees the same resample.
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const auto t = sc::sc_risk_terms(zc, rc, zu, {loss, grid[j], false});
      sum[j] += t.positive + t.negative;
      sumsq[j] += (t.positive + t.negative) * (t.positive + t.negative);
    }
    if (rep < 200) {
      // The library estimate needs a network; a linear one on one-hot cells reproduces z exactly.
      nn::Approximator lin({20, 1}, 0);
      Eigen::VectorXd theta(21);
      theta.head(20) = z;
      theta(20) = 0.0;
      lin.set_parameters(theta);
      library_beta += sc::beta_optimal(sc::ConfidenceDataset(g_cells(c), rc), sc::UnlabeledDataset(g_cells(u)), lin,
                                       loss) / 200.0;
    }
  }
  std::size_t best = 0;
  std::vector<double> var(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    var[j] = (sumsq[j] - sum[j] * sum[j] / reps) / (reps - 1);
    if (var[j] < var[best]) best = j;
  }
  const bool ok = std::abs(grid[best] - beta_star) <= 0.1 + 1e-12;
  char buf[200];
  std::snprintf(buf, sizeof buf, "grid argmin %.1f, population beta* %.3f, mean library estimate %.3f",
                grid[best], beta_star, library_beta);
  return {ok, buf};
}

Outcome nonneg_estimator() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::normal_distribution<double> nd(0.0, 1.0);
  int violations = 0, mismatches = 0, clamped = 0, open = 0;
  for (int draw = 0; draw < 10000; ++draw) {
    const int n_c = 1 + static_cast<int>(rng() % 20);
    const int n_u = 1 + static_cast<int>(rng() % 40);
    const int dim = 3;
    nn::Inputs xc(n_c, dim), xu(n_u, dim);
    for (int i = 0; i < n_c; ++i)
      for (int j = 0; j < dim; ++j) xc(i, j) = nd(rng);
    for (int i = 0; i < n_u; ++i)
      for (int j = 0; j < dim; ++j) xu(i, j) = nd(rng);
    // Skewing r toward one pushes the negative part below zero.
    const double skew = ud(rng);
    Eigen::VectorXd r(n_c);
    for (int i = 0; i < n_c; ++i) r(i) = std::pow(ud(rng), 1.0 - 0.9 * skew);
    const double beta = ud(rng);
    const auto loss = (rng() % 2) ? nn::LossFn::Logistic : nn::LossFn::Squared;
    const nn::Approximator g({dim, 8, 1}, rng());
    const sc::ConfidenceDataset dc(xc, r);
    const sc::UnlabeledDataset du(xu);
    const sc::ScRiskConfig cfg{loss, beta, true};
    const double nonneg = sc::sc_risk_nonneg(g, dc, du, cfg);
    const double plain = sc::sc_risk(g, dc, du, cfg);
    if (!(nonneg >= 0.0)) ++violations;
    const auto t = sc::sc_risk_terms(g.forward(xc), r, g.forward(xu), cfg);
    if (t.negative >= 0.0) {
      ++open;
      if (std::memcmp(&nonneg, &plain, sizeof(double)) != 0) ++mismatches;
    } else {
      ++clamped;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "negatives %d, unclamped mismatches %d (clamped %d, unclamped %d)", violations,
                mismatches, clamped, open);
  return {violations == 0 && mismatches == 0 && clamped > 0 && open > 0, buf};
}

Outcome gradient_checks() {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const auto unit = [&](Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = nd(rng);
    return Eigen::VectorXd(v.normalized());
  };
  const auto one_hot_rows = [&](int n, int k) {
    nn::Inputs x = nn::Inputs::Zero(n, k);
    for (int i = 0; i < n; ++i) x(i, static_cast<Eigen::Index>(rng() % static_cast<unsigned>(k))) = 1.0;
    return x;
  };
  const auto uniform_vec = [&](int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = ud(rng);
    return v;
  };
  const double h = 1e-5;
  // Relative error of the analytic directional derivative along a random direction
  // and along the gradient itself.
  const auto check = [&](const nn::Approximator& net, const Eigen::VectorXd& grad,
                         const std::function<double(const nn::Approximator&)>& f) {
    const Eigen::VectorXd theta = net.parameters();
    const auto at = [&](const Eigen::VectorXd& t) {
      nn::Approximator probe = net;
      probe.set_parameters(t);
      return f(probe);
    };
    double worst = 0.0;
    for (const Eigen::VectorXd& dir : {unit(theta.size()), Eigen::VectorXd(grad.normalized())}) {
      const double fd = oracle::directional_difference(at, theta, dir, h);
      const double an = grad.dot(dir);
      worst = std::max(worst, std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-300}));
    }
    return worst;
  };

  std::map<std::string, double> worst;
  const int k = 12;
  for (int inst = 0; inst < 20; ++inst) {
    const auto net = nn::Approximator::standard(k, 500 + static_cast<std::uint64_t>(inst));
    {
      const int n_c = 10 + static_cast<int>(rng() % 20), n_u = 20 + static_cast<int>(rng() % 40);
      const sc::ConfidenceDataset dc(one_hot_rows(n_c, k), uniform_vec(n_c));
      const sc::UnlabeledDataset du(one_hot_rows(n_u, k));
      const bool nonneg = inst % 2 == 1;
      const sc::ScRiskConfig cfg{inst % 3 == 0 ? nn::LossFn::Squared : nn::LossFn::Logistic, ud(rng), nonneg};
      const auto vg = sc::sc_risk_value_and_grad(net, dc, du, cfg, nonneg);
      const double e = check(net, vg.gradient, [&](const nn::Approximator& g) {
        return nonneg ? sc::sc_risk_nonneg(g, dc, du, cfg) : sc::sc_risk(g, dc, du, cfg);
      });
      worst["semi-conf"] = std::max(worst["semi-conf"], e);
    }
    const auto agent = gail::WeightedBatch::samples(one_hot_rows(40, k), gail::Source::Agent);
    const auto demo = gail::WeightedBatch::samples(one_hot_rows(30, k), gail::Source::Demo);
    const auto unl = gail::WeightedBatch::samples(one_hot_rows(60, k), gail::Source::Unlabeled);
    const auto conf = gail::WeightedBatch::confidence(one_hot_rows(25, k), uniform_vec(25));
    const double alpha = conf.weight.mean();
    const std::vector<std::pair<std::string, gail::DiscObjective>> objectives{
        {"vanilla", gail::DiscObjective::vanilla()},
        {"reweighted", gail::DiscObjective::reweighted(alpha)},
        {"ic-gail", gail::DiscObjective::ic_gail(alpha, 0.3 + 0.6 * ud(rng))}};
    for (const auto& [name, obj] : objectives) {
      const auto terms = gail::build_terms(obj, {agent, demo, conf, unl});
      const auto vg = gail::value_and_grad(terms, net);
      const double e = check(net, vg.gradient, [&](const nn::Approximator& d) { return gail::evaluate(terms, d); });
      worst[name] = std::max(worst[name], e);
    }
  }
  bool ok = true;
  std::string detail = "max rel. error:";
  for (const auto& [name, e] : worst) {
    ok = ok && e < 1e-5;
    detail += " " + name + " " + fmt("%.2g", e);
  }
  return {ok, detail};
}

Outcome occupancy_oracles() {
  double worst_sum = 0.0, worst_trip = 0.0, worst_z = 0.0, worst_ret_z = 0.0;
  int cell_fail = 0, ret_fail = 0;
  const std::size_t n = 100000;
  for (std::uint64_t m = 0; m < 10; ++m) {
    const int ns = 6 + static_cast<int>(m % 5), na = 2 + static_cast<int>(m % 3);
    const auto mdp = oracle::random_mdp(ns, na, 0.8 + 0.015 * static_cast<double>(m), 600 + m);
    const auto pi = oracle::random_policy(ns, na, 700 + m);
    const auto occ = env::compute_occupancy(mdp, pi);
    double sum = 0.0;
    for (double v : occ.table()) sum += v;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    const auto back = env::policy_from_occupancy(occ);
    for (std::size_t i = 0; i < pi.table().size(); ++i)
      worst_trip = std::max(worst_trip, std::abs(back.table()[i] - pi.table()[i]));

    const auto xs = env::sample_rollouts(mdp, pi, n, 800 + m);
    std::vector<double> freq(occ.table().size(), 0.0);
    double ret = 0.0, ret_sq = 0.0;
    for (const auto& x : xs) {
      freq[env::flat_index(na, x)] += 1.0;
      const double rr = mdp.reward(x.state, x.action) / (1.0 - mdp.gamma());
      ret += rr;
      ret_sq += rr * rr;
    }
    const int cells = ns * na;
    const double zmax = oracle::sidak_threshold(3.0, cells);
    for (int c = 0; c < cells; ++c) {
      const double pc = occ.at(static_cast<std::size_t>(c));
      const double se = std::sqrt(pc * (1 - pc) / static_cast<double>(n));
      const double zc = std::abs(freq[static_cast<std::size_t>(c)] / static_cast<double>(n) - pc) / se;
      worst_z = std::max(worst_z, zc / zmax);
      if (zc > zmax) ++cell_fail;
    }
    const double mean = ret / static_cast<double>(n);
    const double sd = std::sqrt((ret_sq / static_cast<double>(n) - mean * mean) * n / (n - 1.0));
    const double zr = std::abs(mean - env::expected_return(mdp, pi)) / (sd / std::sqrt(static_cast<double>(n)));
    worst_ret_z = std::max(worst_ret_z, zr);
    if (zr > 3.0) ++ret_fail;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "sum err %.2g, round trip err %.2g, worst cell z/threshold %.2f, worst return z %.2f", worst_sum,
                worst_trip, worst_z, worst_ret_z);
  return {worst_sum <= 1e-9 && worst_trip <= 1e-9 && cell_fail == 0 && ret_fail == 0, buf};
}

// Trains a discriminator on population tables to the optimum of
// E_p[log(1 - D)] + E_{p'}[log D] with p' = alpha p_theta + (1 - alpha) p_non,
// expressed through the IC-GAIL objective with exact confidences.
struct TrainedOptimum {
  double linf = 0.0;
  double value = 0.0;
  double target = 0.0;
};

TrainedOptimum train_to_optimum(const Support& s, const std::vector<double>& p_theta, std::uint64_t seed) {
  const gail::WeightedBatch unl(s.x, Eigen::VectorXd::Ones(s.k), vec(s.p), gail::Source::Unlabeled);
  const gail::WeightedBatch agent(s.x, Eigen::VectorXd::Ones(s.k), vec(p_theta), gail::Source::Agent);
  const gail::WeightedBatch conf(s.x, vec(s.r), vec(s.p), gail::Source::Confidence);
  const gail::DiscObjective obj{gail::Variant::IcGail, s.alpha, s.alpha, s.alpha};
  const auto terms = gail::build_terms(obj, {agent, {}, conf, unl});
  auto d = nn::Approximator::standard(s.k, seed);
  nn::OptimizerState opt(d.parameter_count(), 1e-2);
  for (int i = 0; i < 4000; ++i) gail::disc_step(terms, d, opt);
  opt.learning_rate = 1e-3;
  for (int i = 0; i < 4000; ++i) gail::disc_step(terms, d, opt);

  std::vector<double> pp;
  for (int i = 0; i < s.k; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    pp.push_back(s.alpha * p_theta[ui] + (1 - s.alpha) * s.p_non[ui]);
  }
  const auto dz = sigmoid_all(to_std(d.forward(s.x)));
  TrainedOptimum out;
  for (int i = 0; i < s.k; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    out.linf = std::max(out.linf, std::abs(dz[ui] - pp[ui] / (s.p[ui] + pp[ui])));
  }
  out.value = gail::evaluate(terms, d);
  out.target = -std::log(4.0) + 2.0 * oracle::jsd(s.p, pp);
  return out;
}

Outcome discriminator_optimum() {
  const auto s = make_support(20, 0.4, 51);
  const auto mismatched = train_to_optimum(s, oracle::random_simplex(20, 52), 53);
  const auto matched = train_to_optimum(s, s.p_opt, 54);
  const bool ok = mismatched.linf <= 0.05 && std::abs(mismatched.value - mismatched.target) <= 1e-3 &&
                  std::abs(matched.value + std::log(4.0)) <= 1e-3;
  char buf[240];
  std::snprintf(buf, sizeof buf, "L-inf %.3g, |V - (-log4 + 2 JSD)| %.2g (V %.4f), matched |V + log4| %.2g (L-inf %.3g)",
                mismatched.linf, std::abs(mismatched.value - mismatched.target), mismatched.value,
                std::abs(matched.value + std::log(4.0)), matched.linf);
  return {ok, buf};
}

Outcome identities() {
  double worst_transform = 0.0, worst_bayes = 0.0, worst_direct = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int k = 10 + static_cast<int>(seed);
    const auto s = make_support(k, 0.1 + 0.08 * static_cast<double>(seed), 900 + 3 * seed);
    const auto p_theta = oracle::random_simplex(k, 950 + seed);
    const auto d = nn::Approximator::standard(k, seed);
    const auto dz = sigmoid_all(to_std(d.forward(s.x)));
    const gail::WeightedBatch unl(s.x, Eigen::VectorXd::Ones(k), vec(s.p), gail::Source::Unlabeled);
    const gail::WeightedBatch agent(s.x, Eigen::VectorXd::Ones(k), vec(p_theta), gail::Source::Agent);
    const gail::WeightedBatch conf(s.x, vec(s.r), vec(s.p), gail::Source::Confidence);

    // alpha E_theta[log D] + E_p[(1 - r) log D] == E_{p'}[log D], through the library objective.
    std::vector<double> pp;
    for (int i = 0; i < k; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      pp.push_back(s.alpha * p_theta[ui] + (1 - s.alpha) * s.p_non[ui]);
    }
    const double ic = gail::disc_loss_icgail(d, unl, agent, conf, s.alpha, s.alpha);
    worst_transform = std::max(worst_transform, std::abs(ic - oracle::log_objective(dz, pp, s.p)));

    // E_p[(r / alpha) f] == E_{p_opt}[f].
    const double rw = gail::disc_loss_reweighted(d, agent, conf, s.alpha);
    worst_bayes = std::max(worst_bayes, std::abs(rw - oracle::log_objective(dz, p_theta, s.p_opt)));

    // The same two identities as plain sums with an arbitrary f.
    double lhs_t = 0, rhs_t = 0, lhs_b = 0, rhs_b = 0;
    for (int i = 0; i < k; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double f = std::sin(3.0 * i + 1.0);
      lhs_t += (1 - s.alpha) * s.p_non[ui] * f;
      rhs_t += s.p[ui] * (1 - s.r[ui]) * f;
      lhs_b += s.p_opt[ui] * f;
      rhs_b += s.p[ui] * s.r[ui] / s.alpha * f;
    }
    worst_direct = std::max({worst_direct, std::abs(lhs_t - rhs_t), std::abs(lhs_b - rhs_b)});
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "transformation %.2g, Bayes reweighting %.2g, direct sums %.2g", worst_transform,
                worst_bayes, worst_direct);
  return {worst_transform <= 1e-12 && worst_bayes <= 1e-12 && worst_direct <= 1e-12, buf};
}

// ---------------------------------------------------------------------------

const std::vector<std::uint64_t> kSeeds{0, 1, 2, 3, 4};

double final_mean(const std::vector<bench::SweepRecord>& recs, bench::Method m, double setting) {
  for (const auto& s : bench::summarize_final(recs)) {
    if (s.method == m && s.setting == setting) return s.mean;
  }
  throw std::runtime_error("missing sweep summary");
}

Outcome end_to_end_ordering() {
  const auto cfg = bench::RunConfig::profile("fast");
  std::map<bench::Method, double> mean;
  for (std::uint64_t seed : kSeeds) {
    const auto prepared = bench::prepare(cfg, seed);
    for (bench::Method m : bench::all_methods()) {
      mean[m] += bench::run_method(m, cfg, prepared, seed).back().normalized_return / kSeeds.size();
    }
  }
  using bench::Method;
  const double iw = mean[Method::TwoIwil], ic = mean[Method::IcGail], uc = mean[Method::GailUC],
               rw = mean[Method::GailReweight], c = mean[Method::GailC];
  const bool a = iw - uc >= 0.1, b = iw - rw >= 0.1, d = ic - uc >= 0.1, e = ic - rw >= 0.1, f = rw >= c;
  char buf[400];
  std::snprintf(buf, sizeof buf,
                "2iwil %.3f ic-gail %.3f gail-uc %.3f gail-reweight %.3f gail-c %.3f | "
                "2iwil>uc+.1 %s, 2iwil>rw+.1 %s, ic>uc+.1 %s, ic>rw+.1 %s, rw>=c %s",
                iw, ic, uc, rw, c, a ? "yes" : "no", b ? "yes" : "no", d ? "yes" : "no", e ? "yes" : "no",
                f ? "yes" : "no");
  return {a && b && d && e && f, buf};
}

Outcome noise_robustness() {
  const auto cfg = bench::RunConfig::profile("fast");
  const std::vector<double> sigmas{0.0, 0.1, 0.2, 0.3};
  const std::vector<bench::Method> methods{bench::Method::IcGail, bench::Method::TwoIwil};
  const auto recs = bench::run_noise_ablation(methods, sigmas, cfg, kSeeds);
  bool ok = true;
  std::string detail;
  for (auto m : methods) {
    const double base = final_mean(recs, m, 0.0);
    detail += bench::method_name(m) + ":";
    for (double s : sigmas) {
      const double v = final_mean(recs, m, s);
      ok = ok && base - v <= 0.2;
      detail += " " + fmt("%.3f", v);
    }
    detail += "  ";
  }
  return {ok, detail};
}

Outcome unlabeled_trend() {
  const auto cfg = bench::RunConfig::profile("fast");
  const std::vector<double> fractions{0.2, 0.5, 1.0};
  const std::vector<bench::Method> methods{bench::Method::IcGail, bench::Method::TwoIwil};
  const auto recs = bench::run_unlabeled_ablation(methods, fractions, cfg, kSeeds);
  bool ok = true;
  std::string detail;
  for (auto m : methods) {
    detail += bench::method_name(m) + ":";
    double prev = -1e300;
    for (double f : fractions) {
      const double v = final_mean(recs, m, f);
      ok = ok && v >= prev - 0.02;
      prev = v;
      detail += " " + fmt("%.3f", v);
    }
    detail += "  ";
  }
  return {ok, detail};
}

Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "cil_acceptance_cli";
  fs::remove_all(root);
  const std::vector<std::string> runs{
      "--seed 3 --seeds 2 --iters 15 train --method all",
      "--seed 5 --seeds 1 --iters 5 --noise-sigma 0.1 ablate-noise --sigmas 0,0.2",
      "--seed 6 --seeds 1 --iters 5 ablate-unlabeled --fractions 0.5,1",
  };
  int compared = 0, differing = 0, failed_runs = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<fs::path> dirs;
    for (const char* tag : {"a", "b"}) {
      const fs::path dir = root / (std::to_string(i) + tag);
      const std::string cmd =
          std::string("\"") + CIL_BENCH_EXE + "\" " + runs[i] + " --out \"" + dir.string() + "\" > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) ++failed_runs;
      dirs.push_back(dir);
    }
    if (!fs::exists(dirs[0])) continue;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      const fs::path other = dirs[1] / entry.path().filename();
      ++compared;
      if (!fs::exists(other) || bench::read_text(entry.path().string()) != bench::read_text(other.string())) {
        ++differing;
      }
    }
  }
  fs::remove_all(root);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d CSV files compared, %d differ, %d runs failed", compared, differing,
                failed_runs);
  return {failed_runs == 0 && compared >= 6 && differing == 0, buf};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0 means no stated budget
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "risk equivalence", 1, risk_equivalence},
      {2, "unbiasedness", 30, unbiasedness},
      {3, "variance minimizer", 120, variance_minimizer},
      {4, "non-negative estimator", 0, nonneg_estimator},
      {5, "gradient checks", 60, gradient_checks},
      {6, "occupancy oracles", 120, occupancy_oracles},
      {7, "analytic discriminator optimum", 120, discriminator_optimum},
      {8, "transformation and Bayes identities", 0, identities},
      {9, "end-to-end ordering", 600, end_to_end_ordering},
      {10, "noise robustness", 900, noise_robustness},
      {11, "unlabeled-data trend", 900, unlabeled_trend},
      {12, "CLI determinism", 0, cli_determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && selected.count(c.id) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_seconds <= 0 || secs < c.budget_seconds;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %2d %-36s %s  %s  [%.1f s%s]\n", c.id, c.name, pass ? "PASS" : "FAIL", out.detail.c_str(),
                secs, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
