#include "cil/nn/approximator.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cil/errors.hpp"
#include "cil/rng.hpp"

namespace cil::nn {

Approximator::Approximator(std::vector<int> widths, std::uint64_t seed)
    : widths_(std::move(widths)), seed_(seed) {
  require(widths_.size() >= 2, "approximator needs at least an input and an output width");
  require(widths_.back() == 1, "approximator output width must be 1");
  for (int w : widths_) require(w > 0, "approximator widths must be positive");

  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(widths_[l + 1]) * widths_[l] + widths_[l + 1];
  }
  params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));

  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const int fan_in = widths_[l];
    const int fan_out = widths_[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    const std::size_t n_weights = static_cast<std::size_t>(fan_in) * fan_out;
    for (std::size_t i = 0; i < n_weights; ++i) {
      params_(static_cast<Eigen::Index>(offsets_[l] + i)) = (2.0 * uniform01(rng) - 1.0) * limit;
    }
  }
}

Approximator Approximator::standard(int input_dim, std::uint64_t seed) {
  return Approximator({input_dim, kDefaultHidden, kDefaultHidden, 1}, seed);
}

void Approximator::set_parameters(const Eigen::VectorXd& params) {
  require(params.size() == params_.size(), "parameter vector has wrong size");
  params_ = params;
}

Approximator::LayerView Approximator::layer(std::size_t index) const {
  const int in = widths_[index];
  const int out = widths_[index + 1];
  const double* base = params_.data() + offsets_[index];
  return {decltype(LayerView::weight)(base, out, in),
          decltype(LayerView::bias)(base + static_cast<std::size_t>(out) * in, out)};
}

std::vector<Inputs> Approximator::activations(const Inputs& x) const {
  require(x.cols() == input_dim(), "input dimension does not match the approximator");
  std::vector<Inputs> acts;
  acts.reserve(widths_.size());
  acts.push_back(x);
  const std::size_t n_layers = widths_.size() - 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto view = layer(l);
    Inputs z = acts.back() * view.weight.transpose();
    z.rowwise() += view.bias.transpose();
    if (l + 1 < n_layers) z = z.array().tanh();
    acts.push_back(std::move(z));
  }
  return acts;
}

double Approximator::forward(std::span<const double> x) const {
  require(x.size() == static_cast<std::size_t>(input_dim()), "input dimension does not match the approximator");
  Inputs row(1, input_dim());
  for (int i = 0; i < input_dim(); ++i) row(0, i) = x[i];
  return activations(row).back()(0, 0);
}

Eigen::VectorXd Approximator::forward(const Inputs& x) const {
  return activations(x).back().col(0);
}

Eigen::VectorXd Approximator::backward(const Inputs& x, const Eigen::VectorXd& upstream) const {
  require(upstream.size() == x.rows(), "upstream gradient length does not match the batch");
  const auto acts = activations(x);
  Eigen::VectorXd gradient = Eigen::VectorXd::Zero(params_.size());
  Inputs delta = upstream;  // n x 1, derivative w.r.t. pre-activation of the output layer
  for (std::size_t l = widths_.size() - 1; l-- > 0;) {
    const int in = widths_[l];
    const int out = widths_[l + 1];
    double* base = gradient.data() + offsets_[l];
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> dw(base, out, in);
    Eigen::Map<Eigen::VectorXd> db(base + static_cast<std::size_t>(out) * in, out);
    dw.noalias() = delta.transpose() * acts[l];
    db = delta.colwise().sum().transpose();
    if (l == 0) break;
    Inputs back = delta * layer(l).weight;
    // acts[l] holds tanh outputs for hidden layers.
    delta = back.array() * (1.0 - acts[l].array().square());
  }
  return gradient;
}

ValueAndGradient grad(const Approximator& net, const Inputs& inputs, const ScoreObjective& objective) {
  const Eigen::VectorXd scores = net.forward(inputs);
  ScoreObjectiveResult result = objective(scores);
  require(result.dscores.size() == scores.size(), "objective returned a score gradient of the wrong length");
  return {result.value, net.backward(inputs, result.dscores)};
}

void save_checkpoint(const Approximator& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint: " + path);
  const nlohmann::json header = {{"widths", net.widths()},
                                 {"activation", net.activation()},
                                 {"seed", net.seed()},
                                 {"parameter_count", net.parameter_count()}};
  const auto& p = net.parameters();
  out << header.dump() << '\n'
      << nlohmann::json(std::vector<double>(p.data(), p.data() + p.size())).dump() << '\n';
}

Approximator load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read checkpoint: " + path);
  std::string header_line;
  std::string params_line;
  std::getline(in, header_line);
  std::getline(in, params_line);
  try {
    const auto header = nlohmann::json::parse(header_line);
    require(header.at("activation").get<std::string>() == "tanh", "unsupported activation in checkpoint");
    Approximator net(header.at("widths").get<std::vector<int>>(), header.at("seed").get<std::uint64_t>());
    const auto values = nlohmann::json::parse(params_line).get<std::vector<double>>();
    require(values.size() == header.at("parameter_count").get<std::size_t>(), "checkpoint parameter count mismatch");
    net.set_parameters(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace cil::nn
