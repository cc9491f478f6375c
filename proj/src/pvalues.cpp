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

#include "riskcal/pvalues.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "riskcal/error.hpp"
#include "riskcal/numerics.hpp"

namespace riskcal {

std::string_view to_string(PValueMethod m) {
  switch (m) {
    case PValueMethod::kHoeffdingBentkus: return "hb";
    case PValueMethod::kClt: return "clt";
    case PValueMethod::kCombinedMax: return "combined-max";
  }
  return "unknown";
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
}

double hb_impl(double r_hat, double successes_ceil, std::size_t n, double alpha) {
  const auto nd = static_cast<double>(n);
  const double hoeffding = std::exp(-nd * numerics::bernoulli_kl(std::min(r_hat, alpha), alpha));
  const double log_bentkus =
      1.0 + numerics::log_binomial_cdf(static_cast<std::int64_t>(successes_ceil),
                                       static_cast<std::int64_t>(n), alpha);
  const double bentkus = std::exp(log_bentkus);
  return std::clamp(std::min(hoeffding, bentkus), 0.0, 1.0);
}

}  // namespace

double hb_pvalue(double r_hat, std::size_t n, double alpha) {
  check_alpha(alpha);
  if (!(r_hat >= 0.0 && r_hat <= 1.0)) throw InputError("r_hat must lie in [0, 1]");
  if (n == 0) throw InputError("hb_pvalue needs n >= 1");
  return hb_impl(r_hat, std::ceil(static_cast<double>(n) * r_hat), n, alpha);
}

double hb_pvalue_from_sum(double loss_sum, std::size_t n, double alpha) {
  check_alpha(alpha);
  if (n == 0) throw InputError("hb_pvalue needs n >= 1");
  const auto nd = static_cast<double>(n);
  if (!(loss_sum >= 0.0 && loss_sum <= nd)) throw InputError("loss sum must lie in [0, n]");
  return hb_impl(loss_sum / nd, std::ceil(loss_sum), n, alpha);
}

double clt_pvalue(double r_hat, double sigma_hat, std::size_t n, double alpha,
                  CltScaling scaling) {
  check_alpha(alpha);
  if (n < 2) throw InputError("CLT p-values need n >= 2");
  if (!(sigma_hat >= 0.0)) throw InputError("sigma_hat must be nonnegative");
  if (sigma_hat == 0.0) {
    if (r_hat < alpha) return 0.0;
    if (r_hat > alpha) return 1.0;
    return 0.5;
  }
  double z = (alpha - r_hat) / sigma_hat;
  if (scaling == CltScaling::kStandardError) z *= std::sqrt(static_cast<double>(n));
  return numerics::normal_sf(z);
}

PValueMatrix pvalues_from_tensor(const LossTensor& loss, const RiskSpec& spec,
                                 PValueMethod method, CltScaling scaling) {
  spec.validate(loss.risks());
  const std::size_t grid = loss.grid_size(), m = loss.risks(), n = loss.n();
  PValueMatrix out{grid, m, std::vector<double>(grid * m), method};

  if (method == PValueMethod::kHoeffdingBentkus) {
    for (std::size_t l = 0; l < m; ++l) {
      if (!loss.bounded(l)) {
        throw InputError("HB p-values need [0,1]-bounded losses; risk " + std::to_string(l + 1) +
                         " is not declared bounded");
      }
    }
    std::vector<double> sum(grid);
    for (std::size_t l = 0; l < m; ++l) {
      std::fill(sum.begin(), sum.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = loss.row(i, l);
        for (std::size_t j = 0; j < grid; ++j) sum[j] += r[j];
      }
      for (std::size_t j = 0; j < grid; ++j) {
        out.p[j * m + l] =
            hb_pvalue_from_sum(std::min(sum[j], static_cast<double>(n)), n, spec.alphas[l]);
      }
    }
    return out;
  }
  if (method == PValueMethod::kClt) {
    const RiskSummary summary = empirical_risk(loss);
    for (std::size_t j = 0; j < grid; ++j) {
      for (std::size_t l = 0; l < m; ++l) {
        out.p[j * m + l] = clt_pvalue(summary.r_hat(j, l), summary.sigma_hat(j, l), n,
                                      spec.alphas[l], scaling);
      }
    }
    return out;
  }
  throw InputError("p-value method must be hb or clt");
}

PValueVector combine_max(const PValueMatrix& p) {
  PValueVector out{std::vector<double>(p.grid_size, 0.0),
                   p.risks == 1 ? p.method : PValueMethod::kCombinedMax};
  for (std::size_t j = 0; j < p.grid_size; ++j) {
    double best = 0.0;
    for (std::size_t l = 0; l < p.risks; ++l) {
      const double v = p(j, l);
      if (!(v >= 0.0 && v <= 1.0)) throw InputError("p-values must lie in [0, 1]");
      best = std::max(best, v);
    }
    out.p[j] = best;
  }
  return out;
}

PValueVector pvalues(const LossTensor& loss, const RiskSpec& spec, PValueMethod method,
                     CltScaling scaling) {
  return combine_max(pvalues_from_tensor(loss, spec, method, scaling));
}

}  // namespace riskcal
