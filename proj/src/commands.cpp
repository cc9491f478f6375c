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

#include "riskcal/commands.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "riskcal/error.hpp"
#include "riskcal/pipeline.hpp"
#include "riskcal/report.hpp"
#include "riskcal/selection.hpp"
#include "riskcal/simulation.hpp"

namespace riskcal {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TestGraph resolve_graph(const std::string& graph, const ParameterGrid& grid, double delta) {
  if (graph.empty()) throw InputError("sgt needs --graph (fallback, hamming or a JSON file)");
  if (graph == "fallback") {
    if (grid.shape() && grid.shape()->size() == 2) {
      return build_fallback_graph((*grid.shape())[0], (*grid.shape())[1], delta);
    }
    if (grid.dim() == 1) return build_fallback_graph(1, grid.size(), delta);
    throw InputError("fallback graph needs a 1-D grid or a 2-D grid with shape");
  }
  if (graph == "hamming") {
    if (!grid.shape() || grid.shape()->size() != 2 || (*grid.shape())[0] != (*grid.shape())[1]) {
      throw InputError("hamming graph needs a square 2-D grid with shape");
    }
    return build_hamming_graph((*grid.shape())[0], delta);
  }
  return graph_from_json(read_file(graph));
}

PValueMethod parse_pvalue(const std::string& s) {
  if (s == "hb") return PValueMethod::kHoeffdingBentkus;
  if (s == "clt") return PValueMethod::kClt;
  throw InputError("unknown p-value method: " + s);
}

CltScaling parse_scaling(const std::string& s) {
  if (s == "se") return CltScaling::kStandardError;
  if (s == "unscaled") return CltScaling::kUnscaled;
  throw InputError("unknown CLT scaling: " + s);
}

ARConfig ar_config(const SimulateOptions& o) {
  ARConfig c;
  c.n = o.n;
  c.corr = o.corr;
  c.seed = o.seed;
  if (o.risk_curve_path.empty()) {
    c.target_risk = v_shape_curve(o.grid_size, o.r_end, o.r_min);
  } else {
    c.target_risk = load_risk_curve(o.risk_curve_path);
  }
  c.validate();
  return c;
}

}  // namespace

std::vector<double> load_risk_curve(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<double> out;
  const char* p = text.data();
  const char* end = p + text.size();
  while (p < end) {
    while (p < end && (*p == ',' || *p == '\n' || *p == '\r' || *p == ' ' || *p == '\t')) ++p;
    if (p == end) break;
    double v = 0.0;
    const auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc()) throw InputError("risk curve: non-numeric entry in " + path);
    out.push_back(v);
    p = res.ptr;
  }
  if (out.empty()) throw InputError("risk curve is empty: " + path);
  return out;
}

CalibrateResult cmd_calibrate(const CalibrateOptions& o) {
  ParameterGrid grid = ParameterGrid::uniform_unit(1);
  LossTensor loss(1, 1, 1, true);
  if (o.grid_path.empty()) {
    loss = load_loss_csv(std::filesystem::path(o.loss_path));
    grid = ParameterGrid::uniform_unit(loss.grid_size());
  } else {
    grid = load_grid(o.grid_path);
    loss = load_loss_csv(std::filesystem::path(o.loss_path), &grid);
  }
  if (o.alphas.empty()) throw InputError("--alpha is required");

  if (!o.pfdr_nonempty_path.empty()) {
    if (o.alphas.size() != 1) throw InputError("the pFDR transform takes a single alpha");
    const LossTensor nonempty = load_loss_csv(std::filesystem::path(o.pfdr_nonempty_path), &grid);
    loss = pfdr_transform(loss, nonempty, o.alphas.front());
  }

  RiskSpec risk{o.alphas, o.delta};
  if (risk.alphas.size() == 1 && loss.risks() > 1) risk.alphas.assign(loss.risks(), o.alphas[0]);
  risk.validate(loss.risks());

  ProcedureSpec spec;
  spec.kind = parse_procedure(o.procedure);
  spec.pvalue = parse_pvalue(o.pvalue);
  spec.clt_scaling = parse_scaling(o.clt_scaling);
  spec.starts = o.starts;
  spec.split_fraction = o.split_fraction;
  spec.split_levels = o.split_levels;
  spec.eta = o.eta;
  if (spec.kind == Procedure::kUniform) {
    spec.uniform.growth = GrowthFunction::finite_grid(grid.size());
  }
  if (spec.kind == Procedure::kSgt) spec.graph = resolve_graph(o.graph, grid, o.delta);
  else if (!o.graph.empty()) throw InputError("--graph only applies to sgt");
  if (!o.starts.empty() && spec.kind != Procedure::kFixedSequence) {
    throw InputError("--starts only applies to fixed-seq");
  }
  for (std::size_t s : o.starts) {
    if (s >= grid.size()) throw InputError("start index outside the grid");
  }
  if (o.eta && spec.kind != Procedure::kUniform) throw InputError("--eta only applies to uniform");

  const SelectionRule rule = load_selection_rule(o.selection);
  const CalibrationOutcome outcome = run_procedure(spec, loss, grid, risk);
  const RiskSummary summary = empirical_risk(loss);
  const auto selected = select_lexicographic(outcome.rejections, grid, rule.stages, &summary);

  CalibrationReport r;
  r.config = {o.loss_path, o.grid_path, std::string(to_string(spec.kind)), o.pvalue,
              o.clt_scaling, risk.alphas, o.delta, o.starts, o.graph, o.split_fraction,
              o.split_levels, o.eta, rule.name, o.pfdr_nonempty_path};
  r.n = loss.n();
  r.grid = &grid;
  r.summary = &summary;
  r.outcome = &outcome;
  r.selected = selected;
  r.emit_pvalues = o.emit_pvalues;
  return {render_calibration_report(r), !selected};
}

std::string cmd_simulate(const SimulateOptions& o) {
  const LossTensor loss = simulate_ar(ar_config(o), 0);
  std::ostringstream out;
  save_loss_csv(loss, out);
  return out.str();
}

BenchResult cmd_bench(const BenchOptions& o) {
  BenchmarkConfig cfg;
  cfg.ar = ar_config(o.sim);
  cfg.alphas = o.alphas;
  cfg.delta = o.delta;
  cfg.methods.clear();
  for (const auto& m : o.methods) cfg.methods.push_back(parse_bench_method(m));
  cfg.trials = o.trials;
  cfg.threads = o.threads;
  if (o.growth == "grid") {
    cfg.finite_grid_growth = true;
  } else if (o.growth == "fdr") {
    cfg.finite_grid_growth = false;
    cfg.uniform.growth = GrowthFunction::fdr(1);
  } else {
    throw InputError("unknown growth function: " + o.growth);
  }
  const BenchmarkReport report = run_benchmark(cfg);
  BenchmarkEcho echo{o.sim.r_end, o.sim.r_min, o.sim.risk_curve_path, o.growth};
  BenchResult out;
  out.report = render_benchmark_report(report, echo);
  if (o.plot) out.svg = render_benchmark_svg(report);
  if (o.endpoints_csv) out.endpoints_csv = render_endpoints_csv(report);
  return out;
}

}  // namespace riskcal
