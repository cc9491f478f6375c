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

#include "riskcal/uniform_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "riskcal/error.hpp"
#include "riskcal/numerics.hpp"

namespace riskcal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// g1(t; n', gamma, kappa): Bernstein and Chebyshev-type exponents.
double g1(double t, double n_prime, double gamma, double kappa) {
  const double gt2 = gamma * gamma * t * t;
  double bernstein = 0.0;
  if (kappa > 0.0) bernstein = 0.5 * n_prime * gt2 / (1.0 + gt2 / (36.0 * kappa));
  const double root = std::sqrt(1.0 + kappa) - std::sqrt(kappa);
  const double chebyshev = std::log(n_prime * gt2 / (root * root));
  return std::max(bernstein, chebyshev);
}

// g2(t; n, n', gamma, kappa).
double g2(double t, double n, double n_prime, double gamma, double kappa) {
  const double frac = n_prime / (n + n_prime);
  const double g = (1.0 - gamma) * (1.0 - gamma);
  return 0.5 * n * t * t * frac * frac * g / (1.0 + g * t * t / (36.0 * kappa));
}

double log_normal_sf(double x) {
  const double sf = numerics::normal_sf(x);
  if (sf > 0.0) return std::log(sf);
  // Mills-ratio asymptotics once the tail underflows.
  return -0.5 * x * x - std::log(x * std::sqrt(2.0 * std::numbers::pi)) + std::log1p(-1.0 / (x * x));
}

// log of min{g~1, g~2, g~3}(x).
double log_rademacher_tail(double x) {
  const double log_sf = log_normal_sf(x);
  const double log_gauss = -0.5 * x * x;
  const double t1 = std::log(rademacher_c1()) + log_sf;
  const double extra = std::log(rademacher_c2() / (9.0 + x * x)) + log_gauss;
  const double hi = std::max(log_sf, extra);
  const double t2 = hi + std::log1p(std::exp(std::min(log_sf, extra) - hi));
  return std::min({t1, t2, log_gauss});
}

// -log(1 - exp(-g)) for g > 0.
double neg_log_one_minus_exp(double g) { return -std::log(-std::expm1(-g)); }

std::optional<double> log_bound(double t, std::size_t n_samples, const UniformBoundConfig& c) {
  const auto n = static_cast<double>(n_samples);
  const double eta = c.eta;
  const double kappa_plus = eta + 0.5 * t * t + t * std::sqrt(0.25 * t * t + eta);
  double best = kInf;
  bool any = false;
  for (double gamma : c.gammas) {
    for (double mult : c.sample_multipliers) {
      const double n_prime = std::max(1.0, std::ceil(n * mult));
      const double denom_g = g1(t, n_prime, gamma, eta);
      if (!(denom_g > 0.0)) continue;
      const double kappa_minus = eta + (n + gamma * n_prime) / (n + n_prime) * std::sqrt(kappa_plus);
      const double v = c.growth.log_value(n + n_prime) - g2(t, n, n_prime, gamma, kappa_minus) +
                       neg_log_one_minus_exp(denom_g);
      best = std::min(best, v);
      any = true;
    }
    const double denom_g = g1(t, n, gamma, eta);
    if (!(denom_g > 0.0)) continue;
    const double x = std::sqrt(n * (1.0 + eta) / 2.0) * (1.0 - gamma) * t;
    const double v = c.growth.log_value(2.0 * n) + log_rademacher_tail(x) +
                     neg_log_one_minus_exp(denom_g);
    best = std::min(best, v);
    any = true;
  }
  if (!any) return std::nullopt;
  return best;
}

// Bound value with vacuous cells read as the trivial bound 1.
double bound_or_one(double t, std::size_t n, const UniformBoundConfig& c) {
  if (t <= 0.0) return 1.0;
  const auto lb = log_bound(t, n, c);
  if (!lb) return 1.0;
  return std::clamp(std::exp(*lb), 0.0, 1.0);
}

}  // namespace

// GrowthFunction ------------------------------------------------------------

GrowthFunction GrowthFunction::fdr(std::size_t labels) {
  if (labels == 0) throw InputError("FDR growth function needs at least one label");
  GrowthFunction g;
  g.kind_ = Kind::kFdr;
  g.param_ = static_cast<double>(labels);
  return g;
}

GrowthFunction GrowthFunction::finite_grid(std::size_t grid_size) {
  if (grid_size == 0) throw InputError("finite-grid growth function needs a non-empty grid");
  GrowthFunction g;
  g.kind_ = Kind::kFiniteGrid;
  g.param_ = static_cast<double>(grid_size);
  return g;
}

GrowthFunction GrowthFunction::table(std::vector<std::pair<std::uint64_t, double>> entries) {
  if (entries.empty()) throw InputError("growth table is empty");
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (!(entries[k].second >= 1.0)) throw InputError("growth table values must be >= 1");
    if (k > 0 && entries[k].first <= entries[k - 1].first) {
      throw InputError("growth table sample sizes must increase");
    }
  }
  GrowthFunction g;
  g.kind_ = Kind::kTable;
  g.table_ = std::move(entries);
  return g;
}

double GrowthFunction::value(double n) const { return std::exp(log_value(n)); }

double GrowthFunction::log_value(double n) const {
  switch (kind_) {
    case Kind::kFdr: return std::log(n * param_ + 1.0);
    case Kind::kFiniteGrid: return std::log(param_);
    case Kind::kTable: {
      for (const auto& [size, bound] : table_) {
        if (static_cast<double>(size) >= n) return std::log(bound);
      }
      throw InputError("growth table does not cover n = " + std::to_string(n));
    }
  }
  return kInf;
}

// Config --------------------------------------------------------------------

std::vector<double> UniformBoundConfig::default_gammas() {
  std::vector<double> g(99);
  for (int k = 0; k < 99; ++k) g[static_cast<std::size_t>(k)] = (k + 1) / 100.0;
  return g;
}

void UniformBoundConfig::validate() const {
  if (!(eta >= 0.0)) throw InputError("eta must be nonnegative");
  if (gammas.empty() || sample_multipliers.empty()) throw InputError("search grids must be non-empty");
  for (double g : gammas) {
    if (!(g > 0.0 && g < 1.0)) throw InputError("gamma grid must lie inside (0, 1)");
  }
  for (double m : sample_multipliers) {
    if (!(m > 0.0)) throw InputError("n' multipliers must be positive");
  }
  if (!(tolerance > 0.0)) throw InputError("tolerance must be positive");
}

double rademacher_c1() { return 1.0 / (4.0 * numerics::normal_sf(std::numbers::sqrt2)); }

double rademacher_c2() {
  return 5.0 * std::sqrt(std::numbers::e) * (2.0 * numerics::normal_cdf(1.0) - 1.0);
}

// Bounds --------------------------------------------------------------------

double tail_bound_upper(double t, std::size_t n, const UniformBoundConfig& config) {
  config.validate();
  if (!(t > 0.0)) throw InputError("t must be positive");
  if (n == 0) throw InputError("n must be at least 1");
  const auto lb = log_bound(t, n, config);
  if (!lb) throw InputError("bound vacuous at this t");
  return std::clamp(std::exp(*lb), 0.0, 1.0);
}

double solve_t(double eta, double delta, std::size_t n, const UniformBoundConfig& config) {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  if (n == 0) throw InputError("n must be at least 1");
  UniformBoundConfig c = config;
  c.eta = eta;
  c.validate();

  // Beyond t = 1 / sqrt(1 + eta) the bound at r_hat = 0 already reaches 1, so nothing
  // could ever be certified.
  const double t_cap = 1.0 / std::sqrt(1.0 + eta);
  double hi = t_cap / 64.0;
  while (bound_or_one(hi, n, c) > delta) {
    if (hi >= t_cap) throw InputError("sample size too small for uniform certification");
    hi = std::min(2.0 * hi, t_cap);
  }
  double lo = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double b = bound_or_one(mid, n, c);
    if (b > delta) {
      lo = mid;
    } else {
      hi = mid;
      if (delta - b <= c.tolerance) break;
    }
  }
  return hi;
}

double upper_confidence_bound(double r_hat, double t_star, double eta) {
  if (!(t_star >= 0.0) || !(eta >= 0.0)) throw InputError("t and eta must be nonnegative");
  return r_hat + t_star * std::sqrt(r_hat + eta + 0.25 * t_star * t_star) + 0.5 * t_star * t_star;
}

double certifiable_risk(double eta, double alpha, double delta, std::size_t n,
                        const UniformBoundConfig& config) {
  const double t = solve_t(eta, delta, n, config);
  return alpha - t * std::sqrt(alpha + eta);
}

EtaChoice optimal_eta(double alpha, double delta, std::size_t n,
                      const UniformBoundConfig& config) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");

  auto evaluate = [&](double log_eta) -> std::optional<EtaChoice> {
    const double eta = std::exp(log_eta);
    try {
      const double t = solve_t(eta, delta, n, config);
      return EtaChoice{eta, alpha - t * std::sqrt(alpha + eta), t};
    } catch (const InputError&) {
      return std::nullopt;
    }
  };

  constexpr int kGrid = 25;
  const double lo = std::log(1e-4), hi = 0.0;
  std::vector<double> log_grid(kGrid);
  std::optional<EtaChoice> best;
  int best_k = -1;
  for (int k = 0; k < kGrid; ++k) {
    log_grid[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (kGrid - 1);
    const auto v = evaluate(log_grid[static_cast<std::size_t>(k)]);
    if (v && (!best || v->x > best->x)) {
      best = v;
      best_k = k;
    }
  }
  if (!best) throw InputError("alpha unreachable at this n: no eta admits a critical value");

  // Golden-section refinement between the neighbours of the best grid point.
  double a = log_grid[static_cast<std::size_t>(std::max(best_k - 1, 0))];
  double b = log_grid[static_cast<std::size_t>(std::min(best_k + 1, kGrid - 1))];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  auto score = [&](double le) {
    const auto v = evaluate(le);
    if (v && v->x > best->x) best = v;
    return v ? v->x : -kInf;
  };
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = score(c), fd = score(d);
  for (int iter = 0; iter < 20; ++iter) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = score(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = score(d);
    }
  }
  if (best->x < 0.0) throw InputError("alpha unreachable at this n: x(eta; delta) < 0 for every eta");
  return *best;
}

UniformCalibration calibrate_uniform(const LossTensor& loss, const ParameterGrid& grid,
                                     double alpha, const EtaChoice& eta) {
  if (grid.dim() != 1) throw InputError("uniform calibration needs a 1-D grid");
  if (loss.risks() != 1 || !loss.bounded(0)) {
    throw InputError("uniform calibration needs a single [0,1]-bounded risk");
  }
  if (loss.grid_size() != grid.size()) throw InputError("loss and grid sizes differ");

  UniformCalibration out;
  out.eta = eta;
  const RiskSummary summary = empirical_risk(loss);
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return grid.coord(x, 0) > grid.coord(y, 0);
  });
  for (std::size_t j : order) {
    if (upper_confidence_bound(summary.r_hat(j), eta.t, eta.eta) > alpha) break;
    out.certified.push_back(j);
    out.selected = j;
  }
  return out;
}

UniformCalibration calibrate_uniform(const LossTensor& loss, const ParameterGrid& grid,
                                     double alpha, double delta,
                                     const UniformBoundConfig& config) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  if (grid.dim() != 1) throw InputError("uniform calibration needs a 1-D grid");
  config.validate();
  std::optional<EtaChoice> eta;
  try {
    eta = optimal_eta(alpha, delta, loss.n(), config);
  } catch (const InputError&) {
    return {};  // alpha unreachable at this n: nothing can be certified
  }
  return calibrate_uniform(loss, grid, alpha, *eta);
}

}  // namespace riskcal
