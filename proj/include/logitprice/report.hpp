#pragma once

// Report files from sweep records:
//   records.csv        sorted records
//   summary.csv        per (mode, method, m, T): rows, solved, mean revenue,
//                      mean gap, mean wall time, median nodes
//   time_vs_m.svg      mean wall time against m, one series per (method, T)
//   gap_vs_m.svg       mean relative gap against m, one series per method
//   nodes_vs_time.svg  log-log scatter of B&B nodes against wall time

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "logitprice/sweep.hpp"

namespace logitprice {

/// Spearman rank correlation with average ranks for ties; NaN if either side is constant.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

/// Nodes against wall time over bnb rows with positive values of both.
inline double nodes_time_correlation(const std::vector<ResultRecord>& records) {
  std::vector<double> nodes, time;
  for (const auto& r : records) {
    if (r.method != "bnb" || !r.nodes || *r.nodes == 0 || r.wall_time <= 0.0) continue;
    nodes.push_back(static_cast<double>(*r.nodes));
    time.push_back(r.wall_time);
  }
  return spearman(nodes, time);
}

namespace report_detail {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

/// Minimal SVG chart. Log axes drop nonpositive values.
inline std::string svg_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                             const std::vector<Series>& series, bool lines, bool logx, bool logy) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  const double W = 640, H = 420, left = 70, right = 170, top = 40, bottom = 50;
  auto tx = [&](double v) { return logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return logy ? std::log10(v) : v; };
  auto usable = [&](const std::pair<double, double>& p) {
    return std::isfinite(p.first) && std::isfinite(p.second) && (!logx || p.first > 0) && (!logy || p.second > 0);
  };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      if (!usable(p)) continue;
      x0 = std::min(x0, tx(p.first));
      x1 = std::max(x1, tx(p.first));
      y0 = std::min(y0, ty(p.second));
      y1 = std::max(y1, ty(p.second));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + ph - (ty(v) - y0) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' '
    << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0;
    const double fy = y0 + (y1 - y0) * k / 4.0;
    const double sx = left + pw * k / 4.0;
    const double sy = top + ph - ph * k / 4.0;
    o << "<text x=\"" << num(sx) << "\" y=\"" << num(top + ph + 16) << "\" text-anchor=\"middle\">"
      << num(logx ? std::pow(10.0, fx) : fx) << "</text>\n";
    o << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy + 4) << "\" text-anchor=\"end\">"
      << num(logy ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << escape(xlabel)
    << (logx ? " (log)" : "") << "</text>\n";
  o << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << top + ph / 2
    << ")\">" << escape(ylabel) << (logy ? " (log)" : "") << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % 8];
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : series[s].points)
      if (usable(p)) pts.push_back(p);
    if (lines && pts.size() > 1) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
      for (const auto& p : pts) o << num(px(p.first)) << ',' << num(py(p.second)) << ' ';
      o << "\"/>\n";
    }
    for (const auto& p : pts)
      o << "<circle cx=\"" << num(px(p.first)) << "\" cy=\"" << num(py(p.second)) << "\" r=\"3\" fill=\"" << color
        << "\"/>\n";
    const double ly = top + 14 + 16.0 * static_cast<double>(s);
    o << "<rect x=\"" << W - right + 12 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\"" << color
      << "\"/>\n";
    o << "<text x=\"" << W - right + 28 << "\" y=\"" << ly << "\">" << escape(series[s].label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline bool solved(const ResultRecord& r) { return r.revenue.has_value(); }

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace report_detail

/// Median B&B node count per T over rows with the given m (and any mode).
inline std::map<std::size_t, double> median_nodes_by_T(const std::vector<ResultRecord>& records, std::size_t m) {
  std::map<std::size_t, std::vector<double>> groups;
  for (const auto& r : records)
    if (r.method == "bnb" && r.m == m && r.nodes) groups[r.T].push_back(static_cast<double>(*r.nodes));
  std::map<std::size_t, double> out;
  for (auto& [T, v] : groups) out[T] = report_detail::median(v);
  return out;
}

/// Writes the report files into out_dir and returns their paths.
inline std::vector<std::string> emit_report(std::vector<ResultRecord> records, const std::string& out_dir) {
  using namespace report_detail;
  namespace fs = std::filesystem;
  if (records.empty()) throw InvalidInput("emit_report: no records");
  sort_records(records);

  // Build every file in memory first so a failure writes nothing.
  std::map<std::string, std::string> files;
  {
    std::ostringstream o;
    o << kRecordsHeader << '\n';
    for (const auto& r : records) o << format_record(r) << '\n';
    files["records.csv"] = o.str();
  }

  struct Cell {
    std::size_t rows = 0, ok = 0;
    std::vector<double> revenue, gap, time, nodes;
  };
  using Key = std::tuple<int, std::string, int, std::size_t, std::size_t>;
  std::map<Key, Cell> cells;
  for (const auto& r : records) {
    auto& c = cells[{sweep_detail::mode_rank(r.mode), r.mode, sweep_detail::method_rank(r.method), r.m, r.T}];
    ++c.rows;
    if (!solved(r)) continue;
    ++c.ok;
    c.revenue.push_back(*r.revenue);
    if (r.gap) c.gap.push_back(*r.gap);
    c.time.push_back(r.wall_time);
    if (r.nodes) c.nodes.push_back(static_cast<double>(*r.nodes));
  }
  {
    std::ostringstream o;
    o << "mode,method,m,T,rows,solved,mean_revenue,mean_gap,mean_wall_time,median_nodes\n";
    auto field = [](double x) { return std::isfinite(x) ? sweep_detail::fmt17(x) : std::string(); };
    for (const auto& [key, c] : cells) {
      const auto& method = known_methods()[static_cast<std::size_t>(std::get<2>(key))];
      o << std::get<1>(key) << ',' << method << ',' << std::get<3>(key) << ',' << std::get<4>(key) << ',' << c.rows << ','
        << c.ok << ',' << field(mean(c.revenue)) << ',' << field(mean(c.gap)) << ',' << field(mean(c.time)) << ','
        << field(median(c.nodes)) << '\n';
    }
    files["summary.csv"] = o.str();
  }

  std::map<std::pair<std::string, std::size_t>, std::map<std::size_t, std::vector<double>>> time_groups;
  std::map<std::string, std::map<std::size_t, std::vector<double>>> gap_groups;
  for (const auto& r : records) {
    if (!solved(r)) continue;
    time_groups[{r.method, r.T}][r.m].push_back(r.wall_time);
    if (r.gap) gap_groups[r.method][r.m].push_back(*r.gap);
  }
  std::vector<Series> time_series, gap_series;
  for (const auto& [key, by_m] : time_groups) {
    Series s{key.first + " T=" + std::to_string(key.second), {}};
    for (const auto& [m, v] : by_m) s.points.emplace_back(static_cast<double>(m), mean(v));
    time_series.push_back(std::move(s));
  }
  for (const auto& [method, by_m] : gap_groups) {
    Series s{method, {}};
    for (const auto& [m, v] : by_m) s.points.emplace_back(static_cast<double>(m), mean(v));
    gap_series.push_back(std::move(s));
  }
  files["time_vs_m.svg"] = svg_chart("Wall time vs m", "m", "mean wall time [s]", time_series, true, false, false);
  files["gap_vs_m.svg"] = svg_chart("Relative gap vs m", "m", "mean relative gap", gap_series, true, false, false);

  Series scatter{"bnb", {}};
  for (const auto& r : records)
    if (r.method == "bnb" && r.nodes) scatter.points.emplace_back(r.wall_time, static_cast<double>(*r.nodes));
  const double rho = nodes_time_correlation(records);
  files["nodes_vs_time.svg"] = svg_chart("Nodes vs time, Spearman rho = " + (std::isfinite(rho) ? num(rho) : "n/a"),
                                         "wall time [s]", "nodes", {scatter}, false, true, true);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir)) throw std::runtime_error("cannot create output directory '" + out_dir + "'");
  std::vector<std::string> written;
  for (const auto& [name, text] : files) {
    const auto path = fs::path(out_dir) / name;
    write_text(path, text);
    written.push_back(path.string());
  }
  return written;
}

}  // namespace logitprice
