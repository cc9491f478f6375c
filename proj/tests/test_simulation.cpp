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

#include <doctest.h>

#include <cmath>

#include "riskcal/error.hpp"
#include "riskcal/numerics.hpp"
#include "riskcal/simulation.hpp"

using namespace riskcal;

TEST_CASE("v shape") {
  const auto v = v_shape_curve(5, 0.25, 0.05);
  CHECK(v[0] == doctest::Approx(0.25));
  CHECK(v[2] == doctest::Approx(0.05));
  CHECK(v[4] == doctest::Approx(0.25));
  CHECK(v[1] == doctest::Approx(0.15));
  CHECK(curve_minimum(v) == 2);
  CHECK(curve_minimum(v_shape_curve(4, 0.25, 0.05)) == 1);
  CHECK_THROWS_AS(v_shape_curve(5, 0.05, 0.25), InputError);
  CHECK_THROWS_AS(v_shape_curve(5, 1.0, 0.05), InputError);
  CHECK_THROWS_AS(v_shape_curve(5, 0.25, 0.0), InputError);
}

TEST_CASE("config validation") {
  ARConfig c;
  c.target_risk = {0.3};
  c.corr = 1.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c.corr = 0.5;
  c.target_risk = {0.0};
  CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("simulate_ar is deterministic and bounded") {
  ARConfig c;
  c.n = 200;
  c.target_risk = v_shape_curve(30, 0.25, 0.05);
  c.seed = 4;
  const auto a = simulate_ar(c, 2), b = simulate_ar(c, 2), other = simulate_ar(c, 3);
  CHECK(a == b);
  CHECK(!(a == other));
  for (std::size_t i = 0; i < c.n; ++i) {
    for (std::size_t j = 0; j < 30; ++j) {
      CHECK(a(i, j) >= 0.0);
      CHECK(a(i, j) <= 1.0);
    }
  }
}

TEST_CASE("column means match target risks") {
  ARConfig c;
  c.n = 100000;
  c.corr = 0.0;
  c.target_risk = {0.3, 0.5, 0.3};
  c.seed = 1;
  const auto s = empirical_risk(simulate_ar(c));
  CHECK(std::abs(s.r_hat(0) - 0.3) < 0.005);
  CHECK(std::abs(s.r_hat(1) - 0.5) < 0.005);

  c.corr = 0.9;
  c.target_risk = v_shape_curve(8, 0.25, 0.05);
  const auto s2 = empirical_risk(simulate_ar(c));
  for (std::size_t j = 0; j < 8; ++j) {
    const double se = s2.sigma_hat(j) / std::sqrt(static_cast<double>(c.n));
    CHECK(std::abs(s2.r_hat(j) - c.target_risk[j]) <= 3.0 * se);
  }
}

TEST_CASE("latent chain is stationary with unit variance") {
  // With target 0.5 the shift is zero, so the latent value is the normal quantile of the loss.
  ARConfig c;
  c.n = 100000;
  c.corr = 0.9;
  c.target_risk = std::vector<double>(6, 0.5);
  c.seed = 2;
  const auto loss = simulate_ar(c);
  const double n = static_cast<double>(c.n);
  for (std::size_t j : {0u, 3u, 5u}) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < c.n; ++i) {
      const double u = numerics::normal_quantile(loss(i, j));
      s += u;
      s2 += u * u;
    }
    const double var = s2 / n - (s / n) * (s / n);
    CHECK(std::abs(var - 1.0) <= 3.0 * std::sqrt(2.0 / n));
  }
}

TEST_CASE("multi-risk tensors use independent streams") {
  ARConfig a;
  a.n = 50;
  a.target_risk = {0.2, 0.3};
  a.seed = 7;
  const auto t = simulate_ar_tensor({a, a});
  CHECK(t.risks() == 2);
  bool differs = false;
  for (std::size_t i = 0; i < 50; ++i) differs = differs || t(i, 0, 0) != t(i, 0, 1);
  CHECK(differs);
  ARConfig b = a;
  b.n = 40;
  CHECK_THROWS_AS(simulate_ar_tensor({a, b}), InputError);
}

TEST_CASE("fwer harness edge cases") {
  ARConfig a;
  a.n = 100;
  a.target_risk = v_shape_curve(10, 0.25, 0.05);
  NullConfig cfg{{a}, ParameterGrid::uniform_unit(10), RiskSpec{{0.3}, 0.1}};
  ProcedureSpec bonf;
  CHECK_THROWS_AS(fwer_monte_carlo(bonf, cfg, 99), InputError);
  const auto e = fwer_monte_carlo(bonf, cfg, 100);
  CHECK(e.rate == 0.0);  // no nulls at alpha = 0.3
  CHECK(e.false_rejection_events == 0);
}

TEST_CASE("run_trials is independent of thread count") {
  std::function<double(std::uint64_t)> fn = [](std::uint64_t t) { return std::sqrt(double(t)); };
  CHECK(run_trials<double>(37, 1, fn) == run_trials<double>(37, 4, fn));
  std::function<int(std::uint64_t)> bad = [](std::uint64_t t) -> int {
    if (t == 5) throw InputError("boom");
    return 0;
  };
  CHECK_THROWS_AS(run_trials<int>(10, 3, bad), InputError);
}

TEST_CASE("benchmark basics") {
  BenchmarkConfig cfg;
  cfg.ar.n = 2000;
  cfg.ar.target_risk = v_shape_curve(100, 0.25, 0.05);
  cfg.alphas = {0.1, 0.9};
  cfg.trials = 2;
  const auto r = run_benchmark(cfg);
  REQUIRE(r.endpoints.size() == 2);
  REQUIRE(r.endpoints[0].size() == 4);
  // alpha far above every risk: every method certifies lambda = 1
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(r.endpoint_value(0, k, 1) == 1.0);
  }
  CHECK_THROWS_AS(parse_bench_method("magic"), InputError);
  CHECK(endpoints_ordered(cfg.methods, {5, 4, 3, std::nullopt}));
  CHECK(!endpoints_ordered(cfg.methods, {5, 4, 6, std::nullopt}));
  CHECK(!endpoints_ordered(cfg.methods, {5, 4, 3, 4}));
  CHECK(endpoints_ordered(cfg.methods, {std::nullopt, std::nullopt, std::nullopt, std::nullopt}));
}
