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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace riskcal {

struct CalibrateOptions {
  std::string loss_path;
  std::string grid_path;  // empty: {1/N, ..., 1}
  std::vector<double> alphas;
  double delta = 0.1;
  std::string pvalue = "hb";
  std::string clt_scaling = "se";
  std::string procedure = "bonferroni";
  std::vector<std::size_t> starts;
  std::string graph;  // "fallback", "hamming" or a JSON file
  double split_fraction = 0.5;
  std::size_t split_levels = 100;
  std::optional<double> eta;
  std::string selection = "sup";
  std::string pfdr_nonempty_path;
  bool emit_pvalues = false;
};

struct SimulateOptions {
  std::size_t n = 5000;
  std::size_t grid_size = 1000;
  double corr = 0.9;
  std::uint64_t seed = 0;
  double r_end = 0.25;
  double r_min = 0.05;
  std::string risk_curve_path;
};

struct BenchOptions {
  SimulateOptions sim;
  std::vector<double> alphas = {0.1, 0.15, 0.2};
  double delta = 0.1;
  std::vector<std::string> methods = {"empirical-baseline", "fixed-sequence", "bonferroni",
                                      "uniform"};
  std::size_t trials = 1;
  unsigned threads = 1;
  std::string growth = "grid";
  bool plot = false;
  bool endpoints_csv = false;
};

struct CalibrateResult {
  std::string report;
  bool abstained = false;
};

struct BenchResult {
  std::string report;
  std::string svg;
  std::string endpoints_csv;
};

CalibrateResult cmd_calibrate(const CalibrateOptions& opts);
/// Loss CSV text.
std::string cmd_simulate(const SimulateOptions& opts);
BenchResult cmd_bench(const BenchOptions& opts);

std::vector<double> load_risk_curve(const std::string& path);

}  // namespace riskcal
