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

#include <optional>
#include <string>
#include <vector>

#include "riskcal/pipeline.hpp"
#include "riskcal/selection.hpp"
#include "riskcal/simulation.hpp"

namespace riskcal {

struct CalibrationConfigEcho {
  std::string loss_path;
  std::string grid_path;
  std::string procedure;
  std::string pvalue;
  std::string clt_scaling;
  std::vector<double> alphas;
  double delta = 0.0;
  std::vector<std::size_t> starts;
  std::string graph;
  double split_fraction = 0.0;
  std::size_t split_levels = 0;
  std::optional<double> eta;
  std::string selection;
  std::string pfdr_nonempty_path;
};

struct CalibrationReport {
  CalibrationConfigEcho config;
  std::size_t n = 0;
  const ParameterGrid* grid = nullptr;
  const RiskSummary* summary = nullptr;
  const CalibrationOutcome* outcome = nullptr;
  std::optional<std::size_t> selected;
  bool emit_pvalues = false;
};

std::string render_calibration_report(const CalibrationReport& r);

struct BenchmarkEcho {
  double r_end = 0.0;
  double r_min = 0.0;
  std::string risk_curve_path;
  std::string growth;
};

std::string render_benchmark_report(const BenchmarkReport& report, const BenchmarkEcho& echo);

/// One line per (trial, method, alpha): trial,method,alpha,endpoint_index,endpoint_lambda.
std::string render_endpoints_csv(const BenchmarkReport& report);

/// Self-contained SVG: the true risk curve, one dashed line per alpha, and the first
/// trial's endpoint per method and alpha.
std::string render_benchmark_svg(const BenchmarkReport& report);

std::string tool_version();

}  // namespace riskcal
