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

namespace riskcal::numerics {

/// Standard normal CDF.
double normal_cdf(double x);

/// Upper tail 1 - Phi(x), accurate in the far right tail.
double normal_sf(double x);

/// Inverse of the standard normal CDF; p must lie in (0, 1).
double normal_quantile(double p);

/// Bernoulli relative entropy h1(a, b) = a log(a/b) + (1-a) log((1-a)/(1-b)),
/// with 0 log 0 = 0. Requires a in [0, 1] and b in (0, 1).
double bernoulli_kl(double a, double b);

/// log P(Bin(n, p) <= k), summed exactly over the binomial terms in log space.
/// Returns 0 for k >= n and -inf for k < 0.
double log_binomial_cdf(std::int64_t k, std::int64_t n, double p);

/// P(Bin(n, p) <= k).
double binomial_cdf(std::int64_t k, std::int64_t n, double p);

}  // namespace riskcal::numerics
