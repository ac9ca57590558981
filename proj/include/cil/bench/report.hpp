#pragma once

#include <string>
#include <vector>

#include "cil/bench/experiment.hpp"

namespace cil::bench {

struct CurvePoint {
  int iteration = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Mean and standard error of the normalized return across seeds, per iteration.
std::vector<CurvePoint> aggregate(const std::vector<RunRecord>& records, Method method);

std::string curve_csv(const std::vector<CurvePoint>& curve);
std::string runs_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_runs_csv(const std::string& text);
std::string sweep_csv(const std::vector<FinalSummary>& summary, const std::string& setting_name);

struct Series {
  std::string label;
  std::vector<CurvePoint> curve;
};
std::string learning_curve_svg(const std::vector<Series>& series, const std::string& title);

// Writes <method>.csv per method present, curves.svg and runs.csv into out_dir.
// Returns the written paths.
std::vector<std::string> emit_report(const std::vector<RunRecord>& records, const std::string& out_dir,
                                     const std::string& title = "normalized return");

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace cil::bench
