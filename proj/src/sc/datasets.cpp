#include "cil/sc/datasets.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "cil/errors.hpp"

namespace cil::sc {

ConfidenceDataset::ConfidenceDataset(nn::Inputs features, Eigen::VectorXd confidence)
    : x(std::move(features)), r(std::move(confidence)) {
  require(x.rows() == r.size(), "confidence dataset: feature and confidence counts differ");
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    require(std::isfinite(r(i)) && r(i) >= 0.0 && r(i) <= 1.0, "confidence scores must lie in [0, 1]");
  }
}

void write_jsonl(const std::string& path, const std::vector<DemoRecord>& records) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write dataset: " + path);
  for (const auto& rec : records) {
    nlohmann::json line = {{"x", rec.x}};
    line["r"] = rec.r ? nlohmann::json(*rec.r) : nlohmann::json(nullptr);
    out << line.dump() << '\n';
  }
}

std::vector<DemoRecord> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read dataset: " + path);
  std::vector<DemoRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      DemoRecord rec;
      rec.x = doc.at("x").get<std::vector<double>>();
      const auto& r = doc.at("r");
      if (!r.is_null()) rec.r = r.get<double>();
      records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<DemoRecord> to_records(const ConfidenceDataset& dc, const UnlabeledDataset& du) {
  std::vector<DemoRecord> out;
  out.reserve(static_cast<std::size_t>(dc.size() + du.size()));
  for (Eigen::Index i = 0; i < dc.size(); ++i) {
    out.push_back({std::vector<double>(dc.x.row(i).data(), dc.x.row(i).data() + dc.x.cols()), dc.r(i)});
  }
  for (Eigen::Index i = 0; i < du.size(); ++i) {
    out.push_back({std::vector<double>(du.x.row(i).data(), du.x.row(i).data() + du.x.cols()), std::nullopt});
  }
  return out;
}

std::pair<ConfidenceDataset, UnlabeledDataset> from_records(const std::vector<DemoRecord>& records) {
  require(!records.empty(), "dataset has no records");
  const auto dim = static_cast<Eigen::Index>(records.front().x.size());
  Eigen::Index n_c = 0;
  for (const auto& rec : records) {
    require(static_cast<Eigen::Index>(rec.x.size()) == dim, "dataset records have differing widths");
    if (rec.r) ++n_c;
  }
  nn::Inputs xc(n_c, dim);
  Eigen::VectorXd r(n_c);
  nn::Inputs xu(static_cast<Eigen::Index>(records.size()) - n_c, dim);
  Eigen::Index ic = 0;
  Eigen::Index iu = 0;
  for (const auto& rec : records) {
    auto& target = rec.r ? xc : xu;
    const Eigen::Index row = rec.r ? ic : iu;
    for (Eigen::Index j = 0; j < dim; ++j) target(row, j) = rec.x[static_cast<std::size_t>(j)];
    if (rec.r) {
      r(ic++) = *rec.r;
    } else {
      ++iu;
    }
  }
  return {ConfidenceDataset(std::move(xc), std::move(r)), UnlabeledDataset(std::move(xu))};
}

nn::Inputs rows_of(const nn::Inputs& x, const std::vector<Eigen::Index>& idx) {
  nn::Inputs out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
  return out;
}

}  // namespace cil::sc
