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

#include "riskcal/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskcal/error.hpp"
#include "riskcal/numerics.hpp"
#include "riskcal/random.hpp"

namespace riskcal {

void ARConfig::validate() const {
  if (n == 0) throw InputError("simulation needs n >= 1");
  if (target_risk.empty()) throw InputError("simulation needs at least one grid point");
  if (!(corr >= 0.0 && corr < 1.0)) throw InputError("corr must lie in [0, 1)");
  for (double r : target_risk) {
    if (!(r > 0.0 && r < 1.0)) {
      throw InputError("target risks must lie strictly inside (0, 1)");
    }
  }
}

std::vector<double> v_shape_curve(std::size_t grid_size, double r_end, double r_min) {
  if (grid_size == 0) throw InputError("V shape needs at least one grid point");
  if (!(r_min > 0.0 && r_min <= r_end && r_end < 1.0)) {
    throw InputError("V shape needs 0 < r_min <= r_end < 1");
  }
  std::vector<double> curve(grid_size, r_min);
  if (grid_size == 1) return curve;
  const double center = static_cast<double>(grid_size - 1) / 2.0;
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double frac = std::abs(static_cast<double>(j) - center) / center;
    curve[j] = r_min + (r_end - r_min) * frac;
  }
  return curve;
}

std::size_t curve_minimum(const std::vector<double>& curve) {
  if (curve.empty()) throw InputError("empty risk curve");
  return static_cast<std::size_t>(std::min_element(curve.begin(), curve.end()) - curve.begin());
}

namespace {

constexpr std::uint64_t kRiskStride = 0x9E3779B97F4A7C15ULL;

void fill_ar(const ARConfig& config, std::uint64_t key, std::uint64_t trial, LossTensor& out,
             std::size_t l) {
  const std::size_t N = config.grid_size();
  std::vector<double> mu(N);
  for (std::size_t j = 0; j < N; ++j) {
    mu[j] = std::sqrt(2.0) * numerics::normal_quantile(config.target_risk[j]);
  }
  const double innov = std::sqrt(1.0 - config.corr * config.corr);
  for (std::size_t i = 0; i < config.n; ++i) {
    Philox rng = substream(key, trial, static_cast<std::uint32_t>(i));
    double u = rng.normal();
    out.at(i, 0, l) = numerics::normal_cdf(u + mu[0]);
    for (std::size_t j = 1; j < N; ++j) {
      u = config.corr * u + innov * rng.normal();
      out.at(i, j, l) = numerics::normal_cdf(u + mu[j]);
    }
  }
}

}  // namespace

LossTensor simulate_ar(const ARConfig& config, std::uint64_t trial) {
  config.validate();
  LossTensor out(config.n, config.grid_size(), 1, true);
  fill_ar(config, config.seed, trial, out, 0);
  return out;
}

LossTensor simulate_ar_tensor(const std::vector<ARConfig>& per_risk, std::uint64_t trial) {
  if (per_risk.empty()) throw InputError("simulation needs at least one risk");
  const std::size_t n = per_risk.front().n;
  const std::size_t N = per_risk.front().grid_size();
  LossTensor out(n, N, per_risk.size(), true);
  for (std::size_t l = 0; l < per_risk.size(); ++l) {
    const ARConfig& c = per_risk[l];
    c.validate();
    if (c.n != n || c.grid_size() != N) {
      throw InputError("all risks must share n and the grid size");
    }
    fill_ar(c, c.seed ^ (static_cast<std::uint64_t>(l) * kRiskStride), trial, out, l);
  }
  return out;
}

std::vector<char> NullConfig::null_mask() const {
  if (per_risk.size() != risk.alphas.size()) {
    throw InputError("need one alpha per simulated risk");
  }
  const std::size_t N = grid.size();
  std::vector<char> mask(N, 0);
  for (std::size_t l = 0; l < per_risk.size(); ++l) {
    if (per_risk[l].grid_size() != N) throw InputError("risk curve and grid sizes differ");
    for (std::size_t j = 0; j < N; ++j) {
      // Boundary points (risk exactly alpha) are counted as nulls: the harshest reading.
      if (per_risk[l].target_risk[j] >= risk.alphas[l]) mask[j] = 1;
    }
  }
  return mask;
}

namespace {

FwerEstimate estimate(std::size_t trials, std::size_t events) {
  FwerEstimate e;
  e.trials = trials;
  e.false_rejection_events = events;
  if (trials > 0) {
    e.rate = static_cast<double>(events) / static_cast<double>(trials);
    e.se = std::sqrt(e.rate * (1.0 - e.rate) / static_cast<double>(trials));
  }
  return e;
}

// First null met by a single-start fixed-sequence walk, if any.
std::optional<std::size_t> first_null_on_walk(const ProcedureSpec& spec,
                                              const std::vector<char>& mask) {
  if (spec.kind != Procedure::kFixedSequence || spec.starts.size() > 1) return std::nullopt;
  const std::size_t start = spec.starts.empty() ? 0 : spec.starts.front();
  for (std::size_t j = start; j < mask.size(); ++j) {
    if (mask[j]) return j;
  }
  return std::nullopt;
}

struct TrialOutcome {
  std::vector<char> false_rejection;
  std::vector<char> first_null_hit;
};

}  // namespace

std::vector<FwerEstimate> fwer_monte_carlo(const std::vector<ProcedureSpec>& procedures,
                                           const NullConfig& config, std::size_t trials,
                                           unsigned threads) {
  if (trials < 100) throw InputError("fwer_monte_carlo needs at least 100 trials");
  config.risk.validate(config.per_risk.size());
  const std::vector<char> mask = config.null_mask();
  std::vector<std::optional<std::size_t>> first_null;
  for (const auto& spec : procedures) first_null.push_back(first_null_on_walk(spec, mask));

  auto results = run_trials<TrialOutcome>(trials, threads, [&](std::uint64_t t) {
    const LossTensor loss = simulate_ar_tensor(config.per_risk, t);
    TrialOutcome o;
    for (std::size_t k = 0; k < procedures.size(); ++k) {
      const CalibrationOutcome r = run_procedure(procedures[k], loss, config.grid, config.risk);
      bool bad = false;
      for (std::size_t j : r.rejections.indices) bad = bad || mask[j];
      o.false_rejection.push_back(bad);
      o.first_null_hit.push_back(first_null[k] && r.pvalues[*first_null[k]] <= config.risk.delta);
    }
    return o;
  });

  std::vector<FwerEstimate> out;
  for (std::size_t k = 0; k < procedures.size(); ++k) {
    std::size_t events = 0, hits = 0;
    for (const auto& o : results) {
      events += o.false_rejection[k];
      hits += o.first_null_hit[k];
    }
    FwerEstimate e = estimate(trials, events);
    if (procedures[k].kind == Procedure::kFixedSequence && procedures[k].starts.size() <= 1) {
      const FwerEstimate f = estimate(trials, hits);
      e.first_null_rate = f.rate;
      e.first_null_se = f.se;
    }
    out.push_back(e);
  }
  return out;
}

FwerEstimate fwer_monte_carlo(const ProcedureSpec& procedure, const NullConfig& config,
                              std::size_t trials, unsigned threads) {
  return fwer_monte_carlo(std::vector<ProcedureSpec>{procedure}, config, trials, threads).front();
}

std::string_view to_string(BenchMethod m) {
  switch (m) {
    case BenchMethod::kEmpiricalBaseline: return "empirical-baseline";
    case BenchMethod::kFixedSequence: return "fixed-sequence";
    case BenchMethod::kBonferroni: return "bonferroni";
    case BenchMethod::kUniform: return "uniform";
  }
  return "unknown";
}

BenchMethod parse_bench_method(std::string_view name) {
  for (auto m : {BenchMethod::kEmpiricalBaseline, BenchMethod::kFixedSequence,
                 BenchMethod::kBonferroni, BenchMethod::kUniform}) {
    if (to_string(m) == name) return m;
  }
  throw InputError("unknown method: " + std::string(name));
}

std::optional<double> BenchmarkReport::endpoint_value(std::size_t trial, std::size_t method,
                                                      std::size_t alpha) const {
  const auto& e = endpoints.at(trial).at(method).at(alpha);
  if (!e) return std::nullopt;
  return grid.at(*e);
}

bool endpoints_ordered(const std::vector<BenchMethod>& methods,
                       const std::vector<std::optional<std::size_t>>& endpoints_for_alpha) {
  // uniform <= bonferroni <= fixed-sequence <= empirical baseline, with none below everything.
  const BenchMethod chain[] = {BenchMethod::kUniform, BenchMethod::kBonferroni,
                               BenchMethod::kFixedSequence, BenchMethod::kEmpiricalBaseline};
  std::optional<std::optional<std::size_t>> prev;
  for (BenchMethod m : chain) {
    auto it = std::find(methods.begin(), methods.end(), m);
    if (it == methods.end()) continue;
    const auto& cur = endpoints_for_alpha[static_cast<std::size_t>(it - methods.begin())];
    if (prev && *prev) {
      if (!cur || **prev > *cur) return false;
    }
    prev = cur;
  }
  return true;
}

namespace {

std::optional<std::size_t> rightmost(const std::vector<std::size_t>& sorted_indices) {
  if (sorted_indices.empty()) return std::nullopt;
  return sorted_indices.back();
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  config.ar.validate();
  if (config.alphas.empty()) throw InputError("benchmark needs at least one alpha");
  for (double a : config.alphas) {
    if (!(a > 0.0 && a < 1.0)) throw InputError("alpha must lie in (0, 1)");
  }
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  if (config.methods.empty()) throw InputError("benchmark needs at least one method");
  if (config.trials == 0) throw InputError("benchmark needs at least one trial");

  const std::size_t N = config.ar.grid_size();
  const std::size_t n = config.ar.n;
  const ParameterGrid grid = ParameterGrid::uniform_unit(N);

  BenchmarkReport report;
  report.config = config;
  for (std::size_t j = 0; j < N; ++j) report.grid.push_back(grid.coord(j, 0));
  report.fixed_sequence_start = curve_minimum(config.ar.target_risk);

  UniformBoundConfig ucfg = config.uniform;
  if (config.finite_grid_growth) ucfg.growth = GrowthFunction::finite_grid(N);
  ucfg.validate();
  const bool wants_uniform = std::find(config.methods.begin(), config.methods.end(),
                                       BenchMethod::kUniform) != config.methods.end();
  for (double a : config.alphas) {
    std::optional<EtaChoice> eta;
    if (wants_uniform) {
      try {
        eta = optimal_eta(a, config.delta, n, ucfg);
      } catch (const InputError&) {
      }
    }
    report.uniform_eta.push_back(eta);
  }

  // Pre-specified walk: from the V tip toward larger lambda.
  std::vector<std::size_t> fs_order;
  for (std::size_t j = report.fixed_sequence_start; j < N; ++j) fs_order.push_back(j);

  struct TrialResult {
    std::vector<std::vector<std::optional<std::size_t>>> endpoints;  // [method][alpha]
    std::vector<std::vector<char>> false_rejection;                  // [method][alpha]
  };
  const std::size_t A = config.alphas.size();
  const auto& methods = config.methods;
  const auto& truth = config.ar.target_risk;

  auto results = run_trials<TrialResult>(config.trials, config.threads, [&](std::uint64_t t) {
    const LossTensor loss = simulate_ar(config.ar, t);
    const RiskSummary summary = empirical_risk(loss);
    TrialResult out;
    out.endpoints.assign(methods.size(), std::vector<std::optional<std::size_t>>(A));
    out.false_rejection.assign(methods.size(), std::vector<char>(A, 0));
    for (std::size_t a = 0; a < A; ++a) {
      const double alpha = config.alphas[a];
      PValueVector p;
      p.p.resize(N);
      for (std::size_t j = 0; j < N; ++j) p.p[j] = hb_pvalue(summary.r_hat(j), n, alpha);
      for (std::size_t k = 0; k < methods.size(); ++k) {
        std::vector<std::size_t> certified;
        switch (methods[k]) {
          case BenchMethod::kEmpiricalBaseline:
            for (std::size_t j = 0; j < N; ++j) {
              if (summary.r_hat(j) < alpha) certified.push_back(j);
            }
            break;
          case BenchMethod::kFixedSequence:
            certified = fixed_sequence_ordered(p, config.delta, fs_order, {0}).indices;
            break;
          case BenchMethod::kBonferroni:
            certified = bonferroni(p, config.delta).indices;
            break;
          case BenchMethod::kUniform: {
            const auto& eta = report.uniform_eta[a];
            if (!eta) break;
            // Descending scan from lambda = 1 until the bound first exceeds alpha.
            for (std::size_t j = N; j-- > 0;) {
              if (upper_confidence_bound(summary.r_hat(j), eta->t, eta->eta) > alpha) break;
              certified.push_back(j);
            }
            std::sort(certified.begin(), certified.end());
            break;
          }
        }
        out.endpoints[k][a] = rightmost(certified);
        for (std::size_t j : certified) {
          if (truth[j] > alpha) out.false_rejection[k][a] = 1;
        }
      }
    }
    return out;
  });

  report.fwer.assign(methods.size(), std::vector<FwerEstimate>(A));
  report.ordering_fraction.assign(A, 0.0);
  for (const auto& r : results) report.endpoints.push_back(r.endpoints);
  for (std::size_t a = 0; a < A; ++a) {
    std::size_t ordered = 0;
    for (const auto& trial : report.endpoints) {
      std::vector<std::optional<std::size_t>> col;
      for (const auto& m : trial) col.push_back(m[a]);
      ordered += endpoints_ordered(methods, col);
    }
    report.ordering_fraction[a] =
        static_cast<double>(ordered) / static_cast<double>(config.trials);
    for (std::size_t k = 0; k < methods.size(); ++k) {
      std::size_t events = 0;
      for (const auto& r : results) events += r.false_rejection[k][a];
      report.fwer[k][a] = estimate(config.trials, events);
    }
  }
  return report;
}

}  // namespace riskcal
