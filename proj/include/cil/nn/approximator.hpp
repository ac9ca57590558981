#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cil::nn {

// Row-major sample matrix: one feature vector per row.
using Inputs = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Fully connected scalar-output network: input -> tanh hidden layers -> linear output.
// All parameters live in one flat vector laid out layer by layer as
// [W (out x in, row-major), b (out)].
class Approximator {
 public:
  static constexpr int kDefaultHidden = 100;

  // widths = {input, hidden..., 1}. Glorot-uniform weights, zero biases.
  Approximator(std::vector<int> widths, std::uint64_t seed);
  // Two tanh hidden layers of 100 units.
  static Approximator standard(int input_dim, std::uint64_t seed);

  int input_dim() const { return widths_.front(); }
  const std::vector<int>& widths() const { return widths_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t parameter_count() const { return static_cast<std::size_t>(params_.size()); }

  const Eigen::VectorXd& parameters() const { return params_; }
  void set_parameters(const Eigen::VectorXd& params);
  Eigen::VectorXd& mutable_parameters() { return params_; }

  double forward(std::span<const double> x) const;
  Eigen::VectorXd forward(const Inputs& x) const;

  // Gradient of sum_i upstream_i * g(x_i) with respect to the parameters.
  Eigen::VectorXd backward(const Inputs& x, const Eigen::VectorXd& upstream) const;

  std::string activation() const { return "tanh"; }

 private:
  struct LayerView {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> weight;
    Eigen::Map<const Eigen::VectorXd> bias;
  };
  LayerView layer(std::size_t index) const;
  std::vector<Inputs> activations(const Inputs& x) const;

  std::vector<int> widths_;
  std::vector<std::size_t> offsets_;
  Eigen::VectorXd params_;
  std::uint64_t seed_;
};

// Value and dvalue/dscore of a scalar objective expressed through the network scores.
struct ScoreObjectiveResult {
  double value = 0.0;
  Eigen::VectorXd dscores;
};
using ScoreObjective = std::function<ScoreObjectiveResult(const Eigen::VectorXd& scores)>;

struct ValueAndGradient {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

// Reverse-mode gradient of objective(g(inputs)) with respect to the network parameters.
ValueAndGradient grad(const Approximator& net, const Inputs& inputs, const ScoreObjective& objective);

// Checkpoint: a one-line JSON header (widths, activation, seed, parameter count)
// followed by one line holding the flat parameter array.
void save_checkpoint(const Approximator& net, const std::string& path);
Approximator load_checkpoint(const std::string& path);

}  // namespace cil::nn
