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

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "riskcal/commands.hpp"
#include "riskcal/error.hpp"
#include "riskcal/report.hpp"

namespace {

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw riskcal::InputError("cannot write " + path);
  out << text;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("RISKCAL_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw riskcal::InputError(std::string("RISKCAL_SEED is not an unsigned integer: ") + env);
  }
}

void add_sim_flags(CLI::App* cmd, riskcal::SimulateOptions& o, std::string& v_shape) {
  cmd->add_option("--n", o.n, "Examples")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--N", o.grid_size, "Grid points")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--corr", o.corr, "AR(1) correlation in [0, 1)")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Seed (defaults to RISKCAL_SEED, else 0)");
  auto* vs = cmd->add_option("--v-shape", v_shape, "Canonical V as r_end,r_min")
                 ->capture_default_str();
  cmd->add_option("--risk-curve", o.risk_curve_path, "File of target risks, one per grid point")
      ->excludes(vs);
}

void parse_v_shape(const std::string& text, riskcal::SimulateOptions& o) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw riskcal::InputError("--v-shape expects r_end,r_min");
  try {
    std::size_t a = 0, b = 0;
    const std::string lhs = text.substr(0, comma), rhs = text.substr(comma + 1);
    o.r_end = std::stod(lhs, &a);
    o.r_min = std::stod(rhs, &b);
    if (a != lhs.size() || b != rhs.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw riskcal::InputError("--v-shape expects r_end,r_min");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk calibration by multiple hypothesis testing"};
  app.set_version_flag("--version", riskcal::tool_version());
  app.require_subcommand(1);

  riskcal::CalibrateOptions cal;
  std::string cal_out;
  unsigned cal_threads = 1;
  auto* calibrate = app.add_subcommand("calibrate", "Certify grid points and select one");
  calibrate->add_option("--loss", cal.loss_path, "Loss CSV")->required()->check(CLI::ExistingFile);
  calibrate->add_option("--grid", cal.grid_path, "Grid JSON (default: 1/N, ..., 1)")
      ->check(CLI::ExistingFile);
  calibrate->add_option("--alpha", cal.alphas, "Risk level per risk, comma separated")
      ->required()->delimiter(',');
  calibrate->add_option("--delta", cal.delta, "Error level")->capture_default_str();
  calibrate->add_option("--pvalue", cal.pvalue, "hb or clt")->capture_default_str()
      ->check(CLI::IsMember({"hb", "clt"}));
  calibrate->add_option("--clt-scaling", cal.clt_scaling, "se or unscaled")->capture_default_str()
      ->check(CLI::IsMember({"se", "unscaled"}));
  calibrate->add_option("--procedure", cal.procedure, "Testing procedure")->capture_default_str()
      ->check(CLI::IsMember({"bonferroni", "holm", "fixed-seq", "sgt", "split-fixed-seq",
                             "cascade-2d", "uniform"}));
  calibrate->add_option("--starts", cal.starts, "fixed-seq start indices")->delimiter(',');
  calibrate->add_option("--graph", cal.graph, "sgt graph: fallback, hamming or a JSON file");
  calibrate->add_option("--split-frac", cal.split_fraction, "Fraction used to learn the ordering")
      ->capture_default_str();
  calibrate->add_option("--split-levels", cal.split_levels, "Number of target levels")
      ->capture_default_str();
  calibrate->add_option("--eta", cal.eta, "Fixed eta for the uniform bound");
  calibrate->add_option("--selection", cal.selection, "sup, detection or a JSON file")
      ->capture_default_str();
  calibrate->add_option("--pfdr-nonempty", cal.pfdr_nonempty_path,
                        "Nonempty-indicator CSV; applies the pFDR transform to --loss");
  calibrate->add_flag("--emit-pvalues", cal.emit_pvalues, "Include p-values in the report");
  calibrate->add_option("--threads", cal_threads, "Accepted for symmetry; calibration is serial");
  calibrate->add_option("--out", cal_out, "Report path (default stdout)");

  riskcal::SimulateOptions sim;
  std::string sim_vshape = "0.25,0.05", sim_out;
  auto* simulate = app.add_subcommand("simulate", "Write autoregressive synthetic losses");
  add_sim_flags(simulate, sim, sim_vshape);
  simulate->add_option("--out", sim_out, "Loss CSV path (default stdout)");

  riskcal::BenchOptions bench;
  std::string bench_vshape = "0.25,0.05", bench_out, plot_path, endpoints_path;
  auto* bench_cmd = app.add_subcommand("bench", "Compare methods on synthetic data");
  add_sim_flags(bench_cmd, bench.sim, bench_vshape);
  bench_cmd->add_option("--alphas", bench.alphas, "Risk levels")->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--delta", bench.delta, "Error level")->capture_default_str();
  bench_cmd->add_option("--methods", bench.methods, "Methods")->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--trials", bench.trials, "Monte Carlo trials")->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--threads", bench.threads, "Worker threads")->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--growth", bench.growth, "grid or fdr")->capture_default_str()
      ->check(CLI::IsMember({"grid", "fdr"}));
  bench_cmd->add_option("--plot", plot_path, "Write an SVG plot here");
  bench_cmd->add_option("--endpoints-csv", endpoints_path, "Write per-trial endpoints here");
  bench_cmd->add_option("--out", bench_out, "Report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*calibrate) {
      const auto r = riskcal::cmd_calibrate(cal);
      write_output(cal_out, r.report);
      if (r.abstained) std::cerr << "riskcal: no parameter certified; abstaining\n";
    } else if (*simulate) {
      if (simulate->count("--seed") == 0) sim.seed = default_seed();
      if (sim.risk_curve_path.empty()) parse_v_shape(sim_vshape, sim);
      write_output(sim_out, riskcal::cmd_simulate(sim));
    } else if (*bench_cmd) {
      if (bench_cmd->count("--seed") == 0) bench.sim.seed = default_seed();
      if (bench.sim.risk_curve_path.empty()) parse_v_shape(bench_vshape, bench.sim);
      bench.plot = !plot_path.empty();
      bench.endpoints_csv = !endpoints_path.empty();
      const auto r = riskcal::cmd_bench(bench);
      write_output(bench_out, r.report);
      if (bench.plot) write_output(plot_path, r.svg);
      if (bench.endpoints_csv) write_output(endpoints_path, r.endpoints_csv);
    }
  } catch (const riskcal::InputError& e) {
    std::cerr << "riskcal: " << e.what() << '\n';
    return 2;
  } catch (const riskcal::InvariantError& e) {
    std::cerr << "riskcal: internal error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "riskcal: internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
