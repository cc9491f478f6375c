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
#include <optional>
#include <utility>
#include <vector>

#include "riskcal/loss_data.hpp"

namespace riskcal {

/// Growth function Delta(n): the number of distinct loss patterns a parameter
/// family can produce on n points.
class GrowthFunction {
 public:
  /// Delta(n) = n * labels + 1 (thresholded multi-label FDR losses).
  static GrowthFunction fdr(std::size_t labels);
  /// Delta(n) = grid size, for any loss evaluated on a finite grid.
  static GrowthFunction finite_grid(std::size_t grid_size);
  /// Tabulated upper bounds (n_k, Delta_k), n_k increasing; Delta(n) is read
  /// from the first entry with n_k >= n. Lookups past the table are an error.
  static GrowthFunction table(std::vector<std::pair<std::uint64_t, double>> entries);

  double log_value(double n) const;
  double value(double n) const;

 private:
  enum class Kind { kFdr, kFiniteGrid, kTable };
  Kind kind_ = Kind::kFdr;
  double param_ = 1.0;
  std::vector<std::pair<std::uint64_t, double>> table_;
};

struct UniformBoundConfig {
  double eta = 0.0;
  GrowthFunction growth = GrowthFunction::fdr(1);
  std::vector<double> gammas = default_gammas();
  std::vector<double> sample_multipliers = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  double tolerance = 1e-6;

  static std::vector<double> default_gammas();
  void validate() const;
};

/// c1 = 1 / (4 (1 - Phi(sqrt 2))).
double rademacher_c1();
/// c2 = 5 sqrt(e) (2 Phi(1) - 1).
double rademacher_c2();

/// Upper bound on P(sup_lambda (s - s_hat) / sqrt(s + eta) >= t): the smaller of the
/// symmetrization bound and its Rademacher refinement, each minimized over the
/// configured (gamma, n') grid and clamped to [0, 1].
/// Throws InputError("bound vacuous at this t") when no grid cell is usable.
double tail_bound_upper(double t, std::size_t n, const UniformBoundConfig& config);

/// Critical value t(eta; delta) with tail_bound_upper(t) = delta, found by bisection and
/// rounded to the side where the bound is <= delta.
double solve_t(double eta, double delta, std::size_t n, const UniformBoundConfig& config);

/// R+ = r_hat + t sqrt(r_hat + eta + t^2 / 4) + t^2 / 2.
double upper_confidence_bound(double r_hat, double t_star, double eta);

/// x(eta; delta) = alpha - t(eta; delta) sqrt(alpha + eta): the largest empirical risk
/// whose upper confidence bound still sits at or below alpha.
double certifiable_risk(double eta, double alpha, double delta, std::size_t n,
                        const UniformBoundConfig& config);

struct EtaChoice {
  double eta;
  double x;
  double t;
};

/// Best eta over a 25-point log grid on [1e-4, 1], refined by golden-section search.
EtaChoice optimal_eta(double alpha, double delta, std::size_t n,
                      const UniformBoundConfig& config);

struct UniformCalibration {
  std::optional<std::size_t> selected;  // smallest lambda reached, or none certified
  std::vector<std::size_t> certified;   // every visited index with R+ <= alpha
  std::optional<EtaChoice> eta;         // absent when alpha is unreachable at this n
};

/// Scans a 1-D grid from its largest value downward while R+ <= alpha.
UniformCalibration calibrate_uniform(const LossTensor& loss, const ParameterGrid& grid,
                                     double alpha, double delta,
                                     const UniformBoundConfig& config);

/// Same scan with a precomputed (eta, t) pair.
UniformCalibration calibrate_uniform(const LossTensor& loss, const ParameterGrid& grid,
                                     double alpha, const EtaChoice& eta);

}  // namespace riskcal
