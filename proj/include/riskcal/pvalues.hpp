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
#include <string_view>
#include <vector>

#include "riskcal/loss_data.hpp"

namespace riskcal {

enum class PValueMethod { kHoeffdingBentkus, kClt, kCombinedMax };

std::string_view to_string(PValueMethod m);

/// One p-value per grid point for H_j: "lambda_j does not control the risk".
struct PValueVector {
  std::vector<double> p;
  PValueMethod method = PValueMethod::kHoeffdingBentkus;

  std::size_t size() const { return p.size(); }
  double operator[](std::size_t j) const { return p[j]; }
};

/// Per-risk p-values, flat as j * risks + l.
struct PValueMatrix {
  std::size_t grid_size = 0;
  std::size_t risks = 0;
  std::vector<double> p;
  PValueMethod method = PValueMethod::kHoeffdingBentkus;

  double operator()(std::size_t j, std::size_t l) const { return p[j * risks + l]; }
};

/// Hoeffding-Bentkus p-value for a [0,1]-bounded loss with empirical mean r_hat
/// over n samples:
///   min(exp(-n h1(min(r_hat, alpha), alpha)), e * P(Bin(n, alpha) <= ceil(n r_hat))),
/// clamped to [0, 1].
double hb_pvalue(double r_hat, std::size_t n, double alpha);

/// Same, with the loss sum given directly so ceil(n r_hat) is exact.
double hb_pvalue_from_sum(double loss_sum, std::size_t n, double alpha);

/// How the CLT statistic is scaled. kStandardError uses sqrt(n) (alpha - r_hat) / sigma_hat;
/// kUnscaled reproduces the statistic without the sqrt(n) factor.
enum class CltScaling { kStandardError, kUnscaled };

/// Asymptotic p-value 1 - Phi(z) for possibly unbounded losses; n >= 2.
double clt_pvalue(double r_hat, double sigma_hat, std::size_t n, double alpha,
                  CltScaling scaling = CltScaling::kStandardError);

/// Applies the chosen scalar p-value to every (grid point, risk) cell.
PValueMatrix pvalues_from_tensor(const LossTensor& loss, const RiskSpec& spec, PValueMethod method,
                                 CltScaling scaling = CltScaling::kStandardError);

/// Combines per-risk p-values into one per grid point by taking the max.
PValueVector combine_max(const PValueMatrix& p);

/// Convenience: tensor -> combined p-value vector.
PValueVector pvalues(const LossTensor& loss, const RiskSpec& spec, PValueMethod method,
                     CltScaling scaling = CltScaling::kStandardError);

}  // namespace riskcal
