#include "cil/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cil/errors.hpp"

namespace cil::bench {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

std::vector<CurvePoint> aggregate(const std::vector<RunRecord>& records, Method method) {
  std::map<int, std::vector<double>> by_iter;
  for (const auto& r : records) {
    if (r.method == method) by_iter[r.iteration].push_back(r.normalized_return);
  }
  std::vector<CurvePoint> out;
  for (const auto& [it, values] : by_iter) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    out.push_back({it, mean, values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0});
  }
  return out;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::string out = "iteration,mean,stderr\n";
  for (const auto& p : curve) out += std::to_string(p.iteration) + "," + fmt(p.mean) + "," + fmt(p.stderr_) + "\n";
  return out;
}

std::string runs_csv(const std::vector<RunRecord>& records) {
  std::string out = "method,seed,iteration,raw_return,normalized_return,disc_loss\n";
  for (const auto& r : records) {
    out += method_name(r.method) + "," + std::to_string(r.seed) + "," + std::to_string(r.iteration) + "," +
           fmt(r.raw_return) + "," + fmt(r.normalized_return) + "," + fmt(r.disc_loss) + "\n";
  }
  return out;
}

std::vector<RunRecord> parse_runs_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  require(static_cast<bool>(std::getline(ss, line)) && line.rfind("method,seed,iteration", 0) == 0,
          "runs CSV is missing its header");
  std::vector<RunRecord> out;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto cells = split_line(line);
    require(cells.size() == 6, "runs CSV row has the wrong number of columns");
    try {
      out.push_back({parse_method(cells[0]), std::stoull(cells[1]), std::stoi(cells[2]), std::stod(cells[3]),
                     std::stod(cells[4]), std::stod(cells[5]), 0.0});
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ConfigError*>(&e) != nullptr) throw;
      throw ConfigError("unparsable runs CSV row: " + line);
    }
  }
  return out;
}

std::string sweep_csv(const std::vector<FinalSummary>& summary, const std::string& setting_name) {
  std::string out = "method," + setting_name + ",mean,stderr,n_seeds\n";
  for (const auto& s : summary) {
    out += method_name(s.method) + "," + fmt(s.setting) + "," + fmt(s.mean) + "," + fmt(s.stderr_) + "," +
           std::to_string(s.n_seeds) + "\n";
  }
  return out;
}

std::string learning_curve_svg(const std::vector<Series>& series, const std::string& title) {
  static const char* kColors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;
  int max_iter = 1;
  double lo = 0.0, hi = 1.0;
  for (const auto& s : series) {
    for (const auto& p : s.curve) {
      max_iter = std::max(max_iter, p.iteration);
      lo = std::min(lo, p.mean - p.stderr_);
      hi = std::max(hi, p.mean + p.stderr_);
    }
  }
  const auto px = [&](double it) { return kLeft + (kW - kLeft - kRight) * it / max_iter; };
  const auto py = [&](double v) { return kTop + (kH - kTop - kBottom) * (hi - v) / (hi - lo); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kW / 2 - 60 << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title
      << "</text>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << py(lo) << "\" x2=\"" << px(max_iter) << "\" y2=\"" << py(lo)
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << py(lo) << "\" x2=\"" << kLeft << "\" y2=\"" << py(hi)
      << "\" stroke=\"black\"/>\n";
  for (double v : {0.0, 0.5, 1.0}) {
    if (v < lo || v > hi) continue;
    svg << "<text x=\"" << kLeft - 30 << "\" y=\"" << py(v) + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(v) << "</text>\n";
  }
  svg << "<text x=\"" << px(max_iter) - 10 << "\" y=\"" << py(lo) + 16
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << max_iter << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % 6];
    const auto& c = series[k].curve;
    if (c.empty()) continue;
    svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (const auto& p : c) svg << px(p.iteration) << "," << py(p.mean + p.stderr_) << " ";
    for (auto it = c.rbegin(); it != c.rend(); ++it) svg << px(it->iteration) << "," << py(it->mean - it->stderr_) << " ";
    svg << "\"/>\n<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : c) svg << px(p.iteration) << "," << py(p.mean) << " ";
    svg << "\"/>\n<text x=\"" << kW - kRight + 10 << "\" y=\"" << kTop + 18 * (k + 1) << "\" fill=\"" << color
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[k].label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!out) throw NumericError("write to " + path + " failed");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> emit_report(const std::vector<RunRecord>& records, const std::string& out_dir,
                                     const std::string& title) {
  require(!records.empty(), "report needs at least one record");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create " + out_dir + ": " + ec.message());
  std::vector<std::string> written;
  std::vector<Series> series;
  for (Method m : all_methods()) {
    auto curve = aggregate(records, m);
    if (curve.empty()) continue;
    const std::string path = out_dir + "/" + method_name(m) + ".csv";
    write_text(path, curve_csv(curve));
    written.push_back(path);
    series.push_back({method_name(m), std::move(curve)});
  }
  const std::string runs = out_dir + "/runs.csv";
  write_text(runs, runs_csv(records));
  written.push_back(runs);
  const std::string svg = out_dir + "/curves.svg";
  write_text(svg, learning_curve_svg(series, title));
  written.push_back(svg);
  return written;
}

}  // namespace cil::bench
