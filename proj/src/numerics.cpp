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

#include "riskcal/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "riskcal/error.hpp"

namespace riskcal::numerics {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InputError("normal_quantile: probability must lie in (0, 1)");
  }
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double bernoulli_kl(double a, double b) {
  if (a == b) return 0.0;
  double kl = 0.0;
  if (a > 0.0) kl += a * std::log(a / b);
  if (a < 1.0) kl += (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
  return kl;
}

namespace {

// Error of Stirling's approximation to log(n!).
double stirlerr(double n) {
  constexpr double s0 = 1.0 / 12.0, s1 = 1.0 / 360.0, s2 = 1.0 / 1260.0, s3 = 1.0 / 1680.0,
                   s4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  const double nn = n * n;
  if (n > 500.0) return (s0 - s1 / nn) / n;
  if (n > 80.0) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35.0) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x log(x / np) + np - x, without cancellation when x is close to np.
double bd0(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    const double v2 = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v2;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

// Saddle-point evaluation of log P(Bin(n, p) = x), accurate to a few ulps for large n.
double log_binomial_pmf(double x, double n, double p) {
  const double q = 1.0 - p;
  if (x == 0.0) return n * std::log1p(-p);
  if (x == n) return n * std::log(p);
  const double lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

}  // namespace

double log_binomial_cdf(std::int64_t k, std::int64_t n, double p) {
  if (k < 0) return -std::numeric_limits<double>::infinity();
  if (k >= n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return -std::numeric_limits<double>::infinity();

  const auto nd = static_cast<double>(n);

  // Walk down from k using the term ratio t(i-1)/t(i) = i q / ((n-i+1) p). Terms are
  // accumulated relative to the largest one seen so the sum never underflows.
  const double mode = std::floor((nd + 1.0) * p);
  const double ratio_qp = (1.0 - p) / p;
  double anchor = log_binomial_pmf(static_cast<double>(k), nd, p);
  double rel = 1.0;  // current term / exp(anchor)
  double sum = 1.0;
  for (std::int64_t i = k; i > 0; --i) {
    rel *= static_cast<double>(i) * ratio_qp / (nd - static_cast<double>(i) + 1.0);
    if (rel > 1e250) {
      anchor += std::log(rel);
      sum /= rel;
      rel = 1.0;
    }
    sum += rel;
    if (static_cast<double>(i) <= mode && rel < sum * 1e-18) break;
  }
  return std::min(0.0, anchor + std::log(sum));
}

double binomial_cdf(std::int64_t k, std::int64_t n, double p) {
  return std::exp(log_binomial_cdf(k, n, p));
}

}  // namespace riskcal::numerics
