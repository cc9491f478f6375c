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

#include "riskcal/report.hpp"

#include <sstream>

#include <json.hpp>

namespace riskcal {

using nlohmann::json;

std::string tool_version() { return RISKCAL_VERSION; }

namespace {

json tool_block(const char* command) {
  return {{"name", "riskcal"}, {"version", tool_version()}, {"command", command}};
}

json point_json(const ParameterGrid& grid, std::size_t j) {
  const auto pt = grid.point(j);
  return json(std::vector<double>(pt.begin(), pt.end()));
}

json optional_index(const std::optional<std::size_t>& j) {
  return j ? json(*j) : json(nullptr);
}

json fwer_json(const FwerEstimate& e) {
  json o{{"trials", e.trials},
         {"false_rejection_events", e.false_rejection_events},
         {"rate", e.rate},
         {"se", e.se}};
  return o;
}

}  // namespace

std::string render_calibration_report(const CalibrationReport& r) {
  const ParameterGrid& grid = *r.grid;
  const RiskSummary& summary = *r.summary;
  const CalibrationOutcome& out = *r.outcome;
  const auto& c = r.config;

  json config{{"loss", c.loss_path},
              {"grid", c.grid_path},
              {"procedure", c.procedure},
              {"pvalue", c.pvalue},
              {"clt_scaling", c.clt_scaling},
              {"alphas", c.alphas},
              {"delta", c.delta},
              {"selection", c.selection}};
  if (!c.starts.empty()) config["starts"] = c.starts;
  if (!c.graph.empty()) config["graph"] = c.graph;
  if (c.procedure == "split-fixed-seq") {
    config["split_fraction"] = c.split_fraction;
    config["split_levels"] = c.split_levels;
  }
  if (c.eta) config["eta"] = *c.eta;
  if (!c.pfdr_nonempty_path.empty()) config["pfdr_nonempty"] = c.pfdr_nonempty_path;

  json risks = json::array();
  for (std::size_t j = 0; j < summary.grid_size; ++j) {
    json mean = json::array(), sd = json::array();
    for (std::size_t l = 0; l < summary.risks; ++l) {
      mean.push_back(summary.r_hat(j, l));
      sd.push_back(summary.sigma_hat(j, l));
    }
    risks.push_back({{"index", j}, {"lambda", point_json(grid, j)}, {"r_hat", mean},
                     {"sigma_hat", sd}});
  }

  json certified = json::array();
  for (std::size_t j : out.rejections.indices) certified.push_back(point_json(grid, j));

  json doc{{"tool", tool_block("calibrate")},
           {"config", config},
           {"data", {{"n", r.n}, {"grid_size", grid.size()}, {"dim", grid.dim()},
                     {"risks", summary.risks}}},
           {"risk_summary", risks},
           {"certified",
            {{"indices", out.rejections.indices},
             {"lambdas", certified},
             {"audit", json::parse(rejection_to_json(out.rejections))}}}};
  if (r.emit_pvalues) doc["pvalues"] = out.pvalues.p;
  if (!out.ordering.empty()) doc["ordering"] = out.ordering;
  if (c.procedure == "uniform") {
    doc["uniform"] = out.eta ? json{{"eta", out.eta->eta}, {"x", out.eta->x}, {"t", out.eta->t}}
                             : json(nullptr);
  }
  json sel{{"rule", c.selection}, {"abstained", !r.selected}};
  sel["index"] = optional_index(r.selected);
  sel["lambda"] = r.selected ? point_json(grid, *r.selected) : json(nullptr);
  doc["selection"] = sel;
  return doc.dump(2) + "\n";
}

std::string render_benchmark_report(const BenchmarkReport& report, const BenchmarkEcho& echo) {
  const auto& cfg = report.config;
  json methods = json::array();
  for (auto m : cfg.methods) methods.push_back(std::string(to_string(m)));
  json config{{"n", cfg.ar.n},
              {"grid_size", cfg.ar.grid_size()},
              {"corr", cfg.ar.corr},
              {"seed", cfg.ar.seed},
              {"alphas", cfg.alphas},
              {"delta", cfg.delta},
              {"methods", methods},
              {"trials", cfg.trials},
              {"pvalue", "hb"},
              {"growth", echo.growth}};
  if (echo.risk_curve_path.empty()) {
    config["v_shape"] = {{"r_end", echo.r_end}, {"r_min", echo.r_min}};
  } else {
    config["risk_curve"] = echo.risk_curve_path;
  }

  json rows = json::array();
  for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
    json first = json::array(), first_idx = json::array(), fwer = json::array(),
         nonempty = json::array();
    for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
      const auto v = report.endpoint_value(0, k, a);
      first.push_back(v ? json(*v) : json(nullptr));
      first_idx.push_back(optional_index(report.endpoints[0][k][a]));
      std::size_t count = 0;
      for (const auto& t : report.endpoints) count += t[k][a].has_value();
      nonempty.push_back(static_cast<double>(count) / static_cast<double>(report.endpoints.size()));
      json f = fwer_json(report.fwer[k][a]);
      f["alpha"] = cfg.alphas[a];
      fwer.push_back(f);
    }
    rows.push_back({{"method", to_string(cfg.methods[k])},
                    {"endpoint", first},
                    {"endpoint_index", first_idx},
                    {"certified_fraction", nonempty},
                    {"fwer", fwer}});
  }

  json etas = json::array();
  for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
    const auto& e = report.uniform_eta.empty() ? std::nullopt : report.uniform_eta[a];
    etas.push_back(e ? json{{"alpha", cfg.alphas[a]}, {"eta", e->eta}, {"x", e->x}, {"t", e->t}}
                     : json{{"alpha", cfg.alphas[a]}, {"eta", nullptr}, {"x", nullptr},
                            {"t", nullptr}});
  }

  json doc{{"tool", tool_block("bench")},
           {"config", config},
           {"fixed_sequence_start",
            {{"index", report.fixed_sequence_start},
             {"lambda", report.grid[report.fixed_sequence_start]}}},
           {"methods", rows},
           {"ordering_fraction", report.ordering_fraction},
           {"uniform_eta", etas},
           {"runtime", {{"trials_completed", report.endpoints.size()}}}};
  return doc.dump(2) + "\n";
}

std::string render_endpoints_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "trial,method,alpha,endpoint_index,endpoint_lambda\n";
  const auto& cfg = report.config;
  for (std::size_t t = 0; t < report.endpoints.size(); ++t) {
    for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
      for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
        const auto& e = report.endpoints[t][k][a];
        out << t << ',' << to_string(cfg.methods[k]) << ',' << format_double(cfg.alphas[a]) << ',';
        if (e) out << *e << ',' << format_double(report.grid[*e]);
        else out << ',';
        out << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace riskcal
