#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cil/nn/approximator.hpp"

namespace cil::sc {

// D_c = {(x_i, r_i)}: feature rows paired with confidence scores in [0, 1].
struct ConfidenceDataset {
  nn::Inputs x;
  Eigen::VectorXd r;

  ConfidenceDataset() = default;
  ConfidenceDataset(nn::Inputs features, Eigen::VectorXd confidence);

  Eigen::Index size() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }
};

// D_u = {x_i}: unlabeled feature rows, possibly empty.
struct UnlabeledDataset {
  nn::Inputs x;

  UnlabeledDataset() = default;
  explicit UnlabeledDataset(nn::Inputs features) : x(std::move(features)) {}

  Eigen::Index size() const { return x.rows(); }
};

// One JSON-lines record: {"x": [floats], "r": float|null}; null marks unlabeled.
struct DemoRecord {
  std::vector<double> x;
  std::optional<double> r;
};

void write_jsonl(const std::string& path, const std::vector<DemoRecord>& records);
std::vector<DemoRecord> read_jsonl(const std::string& path);

std::vector<DemoRecord> to_records(const ConfidenceDataset& dc, const UnlabeledDataset& du);
// Splits records into labeled and unlabeled sets; all feature rows must share one width.
std::pair<ConfidenceDataset, UnlabeledDataset> from_records(const std::vector<DemoRecord>& records);

nn::Inputs rows_of(const nn::Inputs& x, const std::vector<Eigen::Index>& idx);

}  // namespace cil::sc
