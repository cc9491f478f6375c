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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskcal/loss_data.hpp"
#include "riskcal/pipeline.hpp"
#include "riskcal/uniform_bounds.hpp"

namespace riskcal {

/// Per-example AR(1) losses L_ij = Phi(u_j + mu_j), u stationary with unit variance,
/// and mu_j = sqrt(2) Phi^{-1}(R_j) so that E[L_ij] = R_j exactly.
struct ARConfig {
  std::size_t n = 5000;
  double corr = 0.9;
  std::vector<double> target_risk;  // one entry per grid point, each in (0, 1)
  std::uint64_t seed = 0;

  std::size_t grid_size() const { return target_risk.size(); }
  void validate() const;
};

/// Linear V: r_end at both extremes, r_min at the centre index (N - 1) / 2.
std::vector<double> v_shape_curve(std::size_t grid_size, double r_end, double r_min);

/// Index of the smallest target risk (first on ties).
std::size_t curve_minimum(const std::vector<double>& curve);

/// Deterministic in (config.seed, trial); each example owns its own substream.
LossTensor simulate_ar(const ARConfig& config, std::uint64_t trial = 0);

/// One independent AR slice per risk, stacked into a multi-risk tensor. All configs must
/// share n.
LossTensor simulate_ar_tensor(const std::vector<ARConfig>& per_risk, std::uint64_t trial = 0);

// Monte Carlo ---------------------------------------------------------------

/// Runs fn(trial) for trial = 0..trials-1 on `threads` workers. Results come back in
/// trial order, so aggregation is independent of the thread count.
template <typename T>
std::vector<T> run_trials(std::size_t trials, unsigned threads,
                          const std::function<T(std::uint64_t)>& fn);

struct FwerEstimate {
  std::size_t trials = 0;
  std::size_t false_rejection_events = 0;
  double rate = 0.0;
  double se = 0.0;
  /// Fixed sequence with one start: how often the first null on the walk had p <= delta.
  std::optional<double> first_null_rate;
  std::optional<double> first_null_se;
};

/// Simulation with exactly known risks: risk l of grid point j is per_risk[l].target_risk[j];
/// H_j is null when some risk exceeds its alpha.
struct NullConfig {
  std::vector<ARConfig> per_risk;
  ParameterGrid grid;
  RiskSpec risk;

  std::vector<char> null_mask() const;
};

FwerEstimate fwer_monte_carlo(const ProcedureSpec& procedure, const NullConfig& config,
                              std::size_t trials, unsigned threads = 1);

/// Several procedures evaluated on the same simulated data sets.
std::vector<FwerEstimate> fwer_monte_carlo(const std::vector<ProcedureSpec>& procedures,
                                           const NullConfig& config, std::size_t trials,
                                           unsigned threads = 1);

// Benchmark -----------------------------------------------------------------

enum class BenchMethod { kEmpiricalBaseline, kFixedSequence, kBonferroni, kUniform };

std::string_view to_string(BenchMethod m);
BenchMethod parse_bench_method(std::string_view name);

struct BenchmarkConfig {
  ARConfig ar;
  std::vector<double> alphas = {0.1, 0.15, 0.2};
  double delta = 0.1;
  std::vector<BenchMethod> methods = {BenchMethod::kEmpiricalBaseline, BenchMethod::kFixedSequence,
                                      BenchMethod::kBonferroni, BenchMethod::kUniform};
  std::size_t trials = 1;
  unsigned threads = 1;
  UniformBoundConfig uniform;  // growth defaults to the finite grid when left as FDR(1)
  bool finite_grid_growth = true;
};

struct BenchmarkReport {
  BenchmarkConfig config;
  std::vector<double> grid;  // lambda values
  /// endpoints[trial][method][alpha]: rightmost certified grid index, or none.
  std::vector<std::vector<std::vector<std::optional<std::size_t>>>> endpoints;
  /// fwer[method][alpha] over all trials (false rejection = certified point with risk > alpha).
  std::vector<std::vector<FwerEstimate>> fwer;
  /// Fraction of trials with uniform <= bonferroni <= fixed-sequence <= empirical, per alpha.
  std::vector<double> ordering_fraction;
  std::vector<std::optional<EtaChoice>> uniform_eta;  // per alpha
  std::size_t fixed_sequence_start = 0;

  std::optional<double> endpoint_value(std::size_t trial, std::size_t method,
                                       std::size_t alpha) const;
};

BenchmarkReport run_benchmark(const BenchmarkConfig& config);

/// Rightmost-endpoint dominance uniform <= bonferroni <= fixed <= empirical with empty
/// sets treated as -infinity. Methods missing from the list are skipped.
bool endpoints_ordered(const std::vector<BenchMethod>& methods,
                       const std::vector<std::optional<std::size_t>>& endpoints_for_alpha);

}  // namespace riskcal

#include "riskcal/detail/run_trials.hpp"
