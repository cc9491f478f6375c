// Copyright 2026 The riskcal Authors.
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

#include <algorithm>
#include <sstream>

#include "riskcal/report.hpp"

namespace riskcal {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 160.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 40.0;

const char* method_color(BenchMethod m) {
  switch (m) {
    case BenchMethod::kEmpiricalBaseline: return "#7f7f7f";
    case BenchMethod::kFixedSequence: return "#d62728";
    case BenchMethod::kBonferroni: return "#1f77b4";
    case BenchMethod::kUniform: return "#2ca02c";
  }
  return "#000000";
}

}  // namespace

std::string render_benchmark_svg(const BenchmarkReport& report) {
  const auto& cfg = report.config;
  const auto& curve = cfg.ar.target_risk;
  double y_max = *std::max_element(curve.begin(), curve.end());
  for (double a : cfg.alphas) y_max = std::max(y_max, a);
  y_max *= 1.1;
  const double x_lo = report.grid.front(), x_hi = report.grid.back();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x_hi > x_lo ? (x - x_lo) / (x_hi - x_lo) : 0.5) * pw; };
  auto sy = [&](double y) { return kTop + (1.0 - y / y_max) * ph; };

  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << sy(0) << "\" x2=\"" << kLeft + pw << "\" y2=\""
    << sy(0) << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << sy(0)
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = y_max * k / 4.0;
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(y) + 4 << "\" text-anchor=\"end\">" << y
      << "</text>\n";
    const double x = x_lo + (x_hi - x_lo) * k / 4.0;
    o << "<text x=\"" << sx(x) << "\" y=\"" << sy(0) + 16 << "\" text-anchor=\"middle\">" << x
      << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 6
    << "\" text-anchor=\"middle\">lambda</text>\n";

  o << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
  for (std::size_t j = 0; j < curve.size(); ++j) {
    o << sx(report.grid[j]) << ',' << sy(curve[j]) << ' ';
  }
  o << "\"/>\n";

  for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
    const double y = sy(cfg.alphas[a]);
    o << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + pw << "\" y2=\"" << y
      << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    o << "<text x=\"" << kLeft + pw + 4 << "\" y=\"" << y + 4 << "\">alpha=" << cfg.alphas[a]
      << "</text>\n";
    for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
      const auto v = report.endpoint_value(0, k, a);
      if (!v) continue;
      o << "<circle cx=\"" << sx(*v) << "\" cy=\"" << y << "\" r=\"4\" fill=\""
        << method_color(cfg.methods[k]) << "\"/>\n";
    }
  }
  for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
    const double y = kTop + 90 + 16.0 * static_cast<double>(k);
    o << "<circle cx=\"" << kLeft + pw + 10 << "\" cy=\"" << y << "\" r=\"4\" fill=\""
      << method_color(cfg.methods[k]) << "\"/>\n";
    o << "<text x=\"" << kLeft + pw + 18 << "\" y=\"" << y + 4 << "\">" << to_string(cfg.methods[k])
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace riskcal
