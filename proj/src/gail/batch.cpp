#include "cil/gail/batch.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "cil/errors.hpp"

namespace cil::gail {

WeightedBatch::WeightedBatch(nn::Inputs features, Eigen::VectorXd weights, Eigen::VectorXd masses, Source src)
    : x(std::move(features)), weight(std::move(weights)), mass(std::move(masses)), source(src) {
  require(weight.size() == x.rows() && mass.size() == x.rows(), "batch weight/mass length differs from row count");
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    require(std::isfinite(weight(i)) && weight(i) >= 0.0, "batch weights must be finite and non-negative");
    require(std::isfinite(mass(i)) && mass(i) >= 0.0, "batch masses must be finite and non-negative");
  }
}

WeightedBatch WeightedBatch::samples(nn::Inputs features, Source src) {
  const auto n = features.rows();
  return WeightedBatch(std::move(features), Eigen::VectorXd::Ones(n), Eigen::VectorXd::Ones(n), src);
}

WeightedBatch WeightedBatch::confidence(nn::Inputs features, Eigen::VectorXd r) {
  const auto n = features.rows();
  return WeightedBatch(std::move(features), std::move(r), Eigen::VectorXd::Ones(n), Source::Confidence);
}

WeightedBatch WeightedBatch::compacted() const {
  using Key = std::vector<double>;
  std::map<Key, Eigen::Index> slot;
  std::vector<Eigen::Index> first_row;
  std::vector<double> merged_mass;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Key key(x.row(i).data(), x.row(i).data() + x.cols());
    key.push_back(weight(i));
    const auto [it, inserted] = slot.emplace(std::move(key), static_cast<Eigen::Index>(first_row.size()));
    if (inserted) {
      first_row.push_back(i);
      merged_mass.push_back(mass(i));
    } else {
      merged_mass[static_cast<std::size_t>(it->second)] += mass(i);
    }
  }
  const auto n = static_cast<Eigen::Index>(first_row.size());
  nn::Inputs xs(n, x.cols());
  Eigen::VectorXd ws(n);
  Eigen::VectorXd ms(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    xs.row(k) = x.row(first_row[static_cast<std::size_t>(k)]);
    ws(k) = weight(first_row[static_cast<std::size_t>(k)]);
    ms(k) = merged_mass[static_cast<std::size_t>(k)];
  }
  return WeightedBatch(std::move(xs), std::move(ws), std::move(ms), source);
}

WeightedBatch WeightedBatch::concat(const WeightedBatch& a, const WeightedBatch& b, Source src) {
  if (a.empty()) return WeightedBatch(b.x, b.weight, b.mass, src);
  if (b.empty()) return WeightedBatch(a.x, a.weight, a.mass, src);
  require(a.x.cols() == b.x.cols(), "cannot concatenate batches of different widths");
  nn::Inputs xs(a.size() + b.size(), a.x.cols());
  xs.topRows(a.size()) = a.x;
  xs.bottomRows(b.size()) = b.x;
  Eigen::VectorXd ws(a.size() + b.size());
  ws << a.weight, b.weight;
  Eigen::VectorXd ms(a.size() + b.size());
  ms << a.mass, b.mass;
  return WeightedBatch(std::move(xs), std::move(ws), std::move(ms), src);
}

std::string source_name(Source source) {
  switch (source) {
    case Source::Agent:
      return "agent";
    case Source::Unlabeled:
      return "unlabeled";
    case Source::Confidence:
      return "confidence";
    case Source::Demo:
      return "demo";
  }
  return "unknown";
}

}  // namespace cil::gail
