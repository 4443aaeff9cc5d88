// Copyright 2026 The Darkpool Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// CSV and SVG emission for experiment traces, plus CSV re-import.
//
// CSV columns: round,algorithm,mean_cum_reward,stderr,mean_alloc_venue_1..K
// with one row per (algorithm, round). Numbers use %.17g so a re-imported
// file reproduces the doubles exactly.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "darkpool/harness.hpp"

namespace darkpool::output {

// Aggregate statistics of one algorithm, as written to and read from CSV.
struct SeriesStats {
  std::string algorithm;
  std::vector<double> mean;    // per round
  std::vector<double> std_err;  // per round
  std::vector<double> alloc;   // T x K
};

struct TraceStats {
  int venues = 0;
  int horizon = 0;
  std::vector<SeriesStats> series;
};

inline TraceStats stats_of(const harness::Trace& tr) {
  TraceStats out{tr.dims.venues, tr.dims.horizon, {}};
  for (const auto& s : tr.series)
    out.series.push_back({harness::to_string(s.algorithm), s.mean_cum_reward, s.stderr_cum_reward, s.mean_allocation});
  return out;
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_header(int venues) {
  std::string h = "round,algorithm,mean_cum_reward,stderr";
  for (int i = 1; i <= venues; ++i) h += ",mean_alloc_venue_" + std::to_string(i);
  return h;
}

inline std::string to_csv(const TraceStats& st) {
  std::string out = csv_header(st.venues) + "\n";
  for (const auto& s : st.series)
    for (int t = 0; t < st.horizon; ++t) {
      out += std::to_string(t + 1);
      out += ',';
      out += s.algorithm;
      out += ',';
      out += fmt(s.mean[t]);
      out += ',';
      out += fmt(s.std_err[t]);
      for (int i = 0; i < st.venues; ++i) {
        out += ',';
        out += fmt(s.alloc[static_cast<std::size_t>(t) * st.venues + i]);
      }
      out += '\n';
    }
  return out;
}

inline std::string to_csv(const harness::Trace& tr) { return to_csv(stats_of(tr)); }

inline TraceStats parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  const std::string prefix = "round,algorithm,mean_cum_reward,stderr";
  if (line.rfind(prefix, 0) != 0) throw std::runtime_error("csv: unexpected header");
  TraceStats st;
  st.venues = static_cast<int>(std::count(line.begin(), line.end(), ',')) - 3;
  if (line != csv_header(st.venues)) throw std::runtime_error("csv: unexpected header");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (static_cast<int>(cells.size()) != 4 + st.venues)
      throw std::runtime_error("csv: wrong column count on line " + std::to_string(lineno));
    if (st.series.empty() || st.series.back().algorithm != cells[1]) st.series.push_back({cells[1], {}, {}, {}});
    auto& s = st.series.back();
    const int round = std::stoi(cells[0]);
    if (round != static_cast<int>(s.mean.size()) + 1)
      throw std::runtime_error("csv: rounds out of order on line " + std::to_string(lineno));
    s.mean.push_back(std::stod(cells[2]));
    s.std_err.push_back(std::stod(cells[3]));
    for (int i = 0; i < st.venues; ++i) s.alloc.push_back(std::stod(cells[4 + i]));
  }
  if (st.series.empty()) throw std::runtime_error("csv: no data rows");
  st.horizon = static_cast<int>(st.series.front().mean.size());
  for (const auto& s : st.series)
    if (static_cast<int>(s.mean.size()) != st.horizon) throw std::runtime_error("csv: series lengths differ");
  return st;
}

inline TraceStats parse_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

// Mean cumulative reward per algorithm with +-1 standard error bars every
// max(1, T/20) rounds.
inline std::string to_svg(const TraceStats& st, const std::string& title = "") {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  const double w = 800, h = 500, left = 80, right = 170, top = 40, bottom = 60;
  const double pw = w - left - right, ph = h - top - bottom;
  double ymax = 0.0;
  for (const auto& s : st.series)
    for (int t = 0; t < st.horizon; ++t) ymax = std::max(ymax, s.mean[t] + s.std_err[t]);
  if (ymax <= 0.0) ymax = 1.0;
  const int horizon = std::max(1, st.horizon);
  auto px = [&](int round) { return left + pw * round / horizon; };
  auto py = [&](double y) { return top + ph * (1.0 - y / ymax); };
  auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return std::string(buf);
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
    << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) o << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">" << title << "</text>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  for (int j = 0; j <= 5; ++j) {
    const int r = static_cast<int>(std::llround(static_cast<double>(st.horizon) * j / 5));
    const double y = ymax * j / 5;
    o << "<text x=\"" << num(px(r)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << r << "</text>\n";
    o << "<text x=\"" << left - 6 << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">" << num(y) << "</text>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 15 << "\" text-anchor=\"middle\">round</text>\n";
  o << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << top + ph / 2
    << ")\">cumulative reward (shares)</text>\n";

  const int every = std::max(1, st.horizon / 20);
  for (std::size_t a = 0; a < st.series.size(); ++a) {
    const auto& s = st.series[a];
    const char* c = colors[a % std::size(colors)];
    // Thin long polylines to at most ~2000 points.
    const int stride = std::max(1, st.horizon / 2000);
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (int t = 0; t < st.horizon; t += stride) o << num(px(t + 1)) << ',' << num(py(s.mean[t])) << ' ';
    if (st.horizon > 0) o << num(px(st.horizon)) << ',' << num(py(s.mean[st.horizon - 1]));
    o << "\"/>\n";
    for (int t = every - 1; t < st.horizon; t += every) {
      const double x = px(t + 1);
      const double lo = py(s.mean[t] - s.std_err[t]), hi = py(s.mean[t] + s.std_err[t]);
      o << "<path d=\"M" << num(x) << ' ' << num(lo) << "V" << num(hi) << "M" << num(x - 3) << ' ' << num(lo) << "h6M"
        << num(x - 3) << ' ' << num(hi) << "h6\" stroke=\"" << c << "\"/>\n";
    }
    const double ly = top + 10 + 20.0 * a;
    o << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40 << "\" y2=\"" << ly
      << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4 << "\">" << s.algorithm << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace darkpool::output
