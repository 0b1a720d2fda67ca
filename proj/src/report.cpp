// Copyright 2026  The phonaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "phonaug/error.hpp"
#include "phonaug/harness.hpp"

namespace phonaug {

namespace {

std::string Fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

void WriteText(const std::string &text, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path + "'");
}

std::string Escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char *const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                "#bcbd22", "#17becf"};

}  // namespace

std::string FormatCsv(const std::vector<ResultRow> &rows) {
  std::vector<ResultRow> sorted = rows;
  SortRows(sorted);
  std::string out = "method,intents,speakers,recordings,trial,seed,accuracy\n";
  for (const auto &r : sorted) {
    out += MethodName(r.method);
    out += ',' + std::to_string(r.intents) + ',' + std::to_string(r.speakers) + ',' +
           std::to_string(r.recordings) + ',' + std::to_string(r.trial) + ',' +
           std::to_string(r.seed) + ',' + Fixed(r.accuracy, 6) + '\n';
  }
  return out;
}

void EmitCsv(const std::vector<ResultRow> &rows, const std::string &path) {
  WriteText(FormatCsv(rows), path);
}

std::string FormatSvg(const std::vector<ResultRow> &rows) {
  if (rows.empty()) throw Error(ErrorKind::kData, "no rows to plot");

  using SeriesKey = std::tuple<std::string, std::size_t, std::size_t>;
  // series -> K -> (sum, count)
  std::map<SeriesKey, std::map<std::size_t, std::pair<double, std::size_t>>> series;
  std::set<std::size_t> ks;
  for (const auto &r : rows) {
    auto &cell = series[{MethodName(r.method), r.intents, r.speakers}][r.recordings];
    cell.first += r.accuracy;
    cell.second += 1;
    ks.insert(r.recordings);
  }

  constexpr double kWidth = 960, kHeight = 540;
  constexpr double kLeft = 70, kRight = 230, kTop = 50, kBottom = 70;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double k_min = static_cast<double>(*ks.begin());
  const double k_max = static_cast<double>(*ks.rbegin());
  auto x_of = [&](double k) {
    return k_max == k_min ? kLeft + plot_w / 2
                          : kLeft + (k - k_min) / (k_max - k_min) * plot_w;
  };
  auto y_of = [&](double acc) { return kTop + (1.0 - acc) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 960 540\" "
         "width=\"960\" height=\"540\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"960\" height=\"540\" fill=\"white\"/>\n";
  svg << "<text x=\"" << Fixed(kLeft + plot_w / 2, 1) << "\" y=\"28\" "
      << "text-anchor=\"middle\" font-size=\"16\">Mean test accuracy vs. recordings "
         "per speaker</text>\n";

  // axes and grid
  svg << "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << Fixed(kLeft, 1) << "\" y1=\"" << Fixed(kTop + plot_h, 1)
      << "\" x2=\"" << Fixed(kLeft + plot_w, 1) << "\" y2=\""
      << Fixed(kTop + plot_h, 1) << "\"/>\n";
  svg << "<line x1=\"" << Fixed(kLeft, 1) << "\" y1=\"" << Fixed(kTop, 1)
      << "\" x2=\"" << Fixed(kLeft, 1) << "\" y2=\"" << Fixed(kTop + plot_h, 1)
      << "\"/>\n";
  svg << "</g>\n<g id=\"ticks\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double acc = i / 5.0;
    const double y = y_of(acc);
    svg << "<line x1=\"" << Fixed(kLeft, 1) << "\" y1=\"" << Fixed(y, 1) << "\" x2=\""
        << Fixed(kLeft + plot_w, 1) << "\" y2=\"" << Fixed(y, 1)
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << Fixed(kLeft - 8, 1) << "\" y=\"" << Fixed(y + 4, 1)
        << "\" text-anchor=\"end\">" << Fixed(acc, 1) << "</text>\n";
  }
  for (std::size_t k : ks) {
    const double x = x_of(static_cast<double>(k));
    svg << "<line x1=\"" << Fixed(x, 1) << "\" y1=\"" << Fixed(kTop + plot_h, 1)
        << "\" x2=\"" << Fixed(x, 1) << "\" y2=\"" << Fixed(kTop + plot_h + 5, 1)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << Fixed(x, 1) << "\" y=\"" << Fixed(kTop + plot_h + 20, 1)
        << "\" text-anchor=\"middle\">" << k << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text x=\"" << Fixed(kLeft + plot_w / 2, 1) << "\" y=\""
      << Fixed(kHeight - 20, 1)
      << "\" text-anchor=\"middle\">recordings per speaker (K)</text>\n";
  svg << "<text x=\"18\" y=\"" << Fixed(kTop + plot_h / 2, 1)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << Fixed(kTop + plot_h / 2, 1) << ")\">accuracy</text>\n";

  svg << "<g id=\"series\" fill=\"none\" stroke-width=\"2\">\n";
  std::size_t index = 0;
  std::ostringstream legend;
  for (const auto &[key, points] : series) {
    const auto &[method, intents, speakers] = key;
    const char *color = kPalette[index % std::size(kPalette)];
    svg << "<polyline stroke=\"" << color << "\" points=\"";
    bool first = true;
    for (const auto &[k, agg] : points) {
      const double mean = agg.first / static_cast<double>(agg.second);
      svg << (first ? "" : " ") << Fixed(x_of(static_cast<double>(k)), 2) << ","
          << Fixed(y_of(mean), 2);
      first = false;
    }
    svg << "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(index);
    const double lx = kWidth - kRight + 20;
    legend << "<line x1=\"" << Fixed(lx, 1) << "\" y1=\"" << Fixed(ly, 1)
           << "\" x2=\"" << Fixed(lx + 24, 1) << "\" y2=\"" << Fixed(ly, 1)
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    legend << "<text x=\"" << Fixed(lx + 30, 1) << "\" y=\"" << Fixed(ly + 4, 1)
           << "\">" << Escape(method) << " I=" << intents << " S=" << speakers
           << "</text>\n";
    ++index;
  }
  svg << "</g>\n<g id=\"legend\">\n" << legend.str() << "</g>\n</svg>\n";
  return svg.str();
}

void EmitSvg(const std::vector<ResultRow> &rows, const std::string &path) {
  WriteText(FormatSvg(rows), path);
}

}  // namespace phonaug
