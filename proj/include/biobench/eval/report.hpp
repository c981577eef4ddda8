#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"
#include "biobench/datagen/io.hpp"
#include "biobench/eval/grid.hpp"

namespace biobench::eval {

namespace fs = std::filesystem;

inline constexpr std::string_view kResultsHeader = "algorithm,preset,variant,k,seed,accuracy,pattern_score,wall_ms,peak_mem_bytes,status";

// Timing columns stay empty unless `timing` is set, so repeated runs give
// byte-identical files.
inline void write_results_csv(std::ostream& os, const std::vector<BenchmarkRecord>& recs, bool timing) {
  os << kResultsHeader << '\n';
  for (const auto& r : recs) {
    os << r.algorithm << ',' << r.preset << ',' << r.variant << ',' << r.k << ',' << r.seed << ',';
    if (r.accuracy) os << format_double(*r.accuracy);
    os << ',';
    if (r.pattern_score) os << format_double(*r.pattern_score);
    os << ',';
    if (timing) os << format_double(r.wall_ms) << ',' << r.peak_mem_bytes;
    else os << ',';
    os << ',' << status_name(r.status) << '\n';
  }
}

inline std::vector<BenchmarkRecord> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("results.csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw DataError("results.csv header mismatch");
  std::vector<BenchmarkRecord> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = datagen::detail::split_csv_line(line);
    if (f.size() != 10) throw DataError("results.csv row " + std::to_string(row) + " has " + std::to_string(f.size()) + " fields");
    BenchmarkRecord r;
    r.algorithm = f[0];
    r.preset = f[1];
    r.variant = f[2];
    r.k = static_cast<int>(parse_double(f[3]));
    r.seed = std::stoull(f[4]);
    if (!f[5].empty()) r.accuracy = parse_double(f[5]);
    if (!f[6].empty()) r.pattern_score = parse_double(f[6]);
    if (!f[7].empty()) r.wall_ms = parse_double(f[7]);
    if (!f[8].empty()) r.peak_mem_bytes = std::stoll(f[8]);
    r.status = parse_status(f[9]);
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_jsonl(std::ostream& os, const std::vector<BenchmarkRecord>& recs) {
  for (const auto& r : recs) os << nlohmann::json(r).dump() << '\n';
}

inline std::vector<BenchmarkRecord> read_jsonl(std::istream& in) {
  std::vector<BenchmarkRecord> out;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<BenchmarkRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw DataError("results.jsonl line " + std::to_string(row) + ": " + e.what());
    }
  }
  return out;
}

inline void write_timings_csv(std::ostream& os, const std::vector<BenchmarkRecord>& recs) {
  os << "algorithm,preset,variant,k,seed,status,wall_ms,peak_mem_bytes\n";
  for (const auto& r : recs)
    os << r.algorithm << ',' << r.preset << ',' << r.variant << ',' << r.k << ',' << r.seed << ',' << status_name(r.status) << ','
       << format_double(r.wall_ms) << ',' << r.peak_mem_bytes << '\n';
}

struct RadarSeries {
  std::string algorithm;
  std::vector<std::pair<std::string, double>> axes; // label, accuracy
  fs::path path;
};

struct RadarReport {
  std::vector<RadarSeries> series;
  std::vector<fs::path> files;
};

// Axes of one algorithm: mean accuracy over seeds, keeping only axes whose
// every cell finished with status ok. Axis order follows first appearance.
inline std::vector<std::pair<std::string, double>> radar_axes(const std::vector<BenchmarkRecord>& recs, const std::string& algorithm) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<double, int>> sum;
  std::map<std::string, bool> bad;
  for (const auto& r : recs) {
    if (r.algorithm != algorithm) continue;
    const std::string ax = r.axis();
    if (!sum.count(ax) && !bad.count(ax)) order.push_back(ax);
    if (r.status != Status::ok || !r.accuracy) {
      bad[ax] = true;
      continue;
    }
    auto& s = sum[ax];
    s.first += *r.accuracy;
    ++s.second;
  }
  std::vector<std::pair<std::string, double>> out;
  for (const auto& ax : order)
    if (!bad.count(ax) && sum.count(ax)) out.emplace_back(ax, sum[ax].first / sum[ax].second);
  return out;
}

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

// Radar chart, radius = raw accuracy in [0, 1].
inline std::string radar_svg(const std::string& title, const std::vector<std::pair<std::string, double>>& axes) {
  constexpr double cx = 300, cy = 300, R = 200;
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 600 600\" width=\"600\" height=\"600\">\n";
  os << "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  os << "<text x=\"300\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">" << xml_escape(title)
     << "</text>\n";
  const std::size_t n = axes.size();
  if (n == 0) {
    os << "<text x=\"300\" y=\"300\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">no completed cells</text>\n";
    os << "</svg>\n";
    return os.str();
  }
  auto angle = [n](std::size_t i) { return -std::numbers::pi / 2 + 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n); };
  for (double level : {0.25, 0.5, 0.75, 1.0})
    os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << R * level
       << "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double a = angle(i);
    const double x = cx + R * std::cos(a), y = cy + R * std::sin(a);
    os << "<line x1=\"" << cx << "\" y1=\"" << cy << "\" x2=\"" << x << "\" y2=\"" << y << "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
    const double lx = cx + (R + 24) * std::cos(a), ly = cy + (R + 24) * std::sin(a);
    const char* anchor = std::abs(std::cos(a)) < 0.2 ? "middle" : (std::cos(a) > 0 ? "start" : "end");
    os << "<text class=\"axis\" x=\"" << lx << "\" y=\"" << ly + 4 << "\" text-anchor=\"" << anchor
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(axes[i].first) << "</text>\n";
  }
  os << "<polygon class=\"series\" data-algorithm=\"" << xml_escape(title) << "\" points=\"";
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::clamp(axes[i].second, 0.0, 1.0), a = angle(i);
    os << (i ? " " : "") << cx + R * v * std::cos(a) << ',' << cy + R * v * std::sin(a);
  }
  os << "\" fill=\"#1f77b4\" fill-opacity=\"0.25\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::clamp(axes[i].second, 0.0, 1.0), a = angle(i);
    os << "<circle cx=\"" << cx + R * v * std::cos(a) << "\" cy=\"" << cy + R * v * std::sin(a) << "\" r=\"3\" fill=\"#1f77b4\"><title>"
       << xml_escape(axes[i].first) << ": " << format_double(axes[i].second) << "</title></circle>\n";
  }
  os << "</svg>\n";
  return os.str();
}

namespace detail {

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << text;
  if (!out) throw DataError("failed writing " + p.string());
}

} // namespace detail

// results.csv, results.jsonl, timings.csv and radar_<algorithm>.svg.
inline RadarReport emit_report(const std::vector<BenchmarkRecord>& recs, const fs::path& out_dir, bool record_timing = false) {
  if (recs.empty()) throw DataError("emit_report needs at least one record");
  for (const auto& r : recs) r.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());

  RadarReport rep;
  std::ostringstream csv, jsonl, timings;
  write_results_csv(csv, recs, record_timing);
  write_jsonl(jsonl, recs);
  write_timings_csv(timings, recs);
  for (const auto& [name, text] : {std::pair{"results.csv", csv.str()}, std::pair{"results.jsonl", jsonl.str()},
                                   std::pair{"timings.csv", timings.str()}}) {
    detail::write_text(out_dir / name, text);
    rep.files.push_back(out_dir / name);
  }

  std::vector<std::string> algorithms;
  for (const auto& r : recs)
    if (std::find(algorithms.begin(), algorithms.end(), r.algorithm) == algorithms.end()) algorithms.push_back(r.algorithm);
  for (const auto& a : algorithms) {
    RadarSeries s{a, radar_axes(recs, a), out_dir / ("radar_" + a + ".svg")};
    detail::write_text(s.path, radar_svg(a, s.axes));
    rep.files.push_back(s.path);
    rep.series.push_back(std::move(s));
  }
  return rep;
}

} // namespace biobench::eval
