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
#include "riskcal/uniform_bounds.hpp"

using namespace riskcal;

namespace {

UniformBoundConfig fdr_config(double eta) {
  UniformBoundConfig c;
  c.eta = eta;
  c.growth = GrowthFunction::fdr(1);
  return c;
}

}  // namespace

TEST_CASE("rademacher constants") {
  CHECK(rademacher_c1() == doctest::Approx(3.178655565886999).epsilon(1e-12));
  CHECK(rademacher_c2() == doctest::Approx(5.627823434849407).epsilon(1e-12));
}

TEST_CASE("growth functions") {
  CHECK(GrowthFunction::fdr(3).value(10) == doctest::Approx(31.0));
  CHECK(GrowthFunction::finite_grid(50).value(1e6) == doctest::Approx(50.0));
  const auto t = GrowthFunction::table({{10, 5.0}, {100, 40.0}});
  CHECK(t.value(7) == doctest::Approx(5.0));
  CHECK(t.value(50) == doctest::Approx(40.0));
  CHECK_THROWS_AS(t.value(101), InputError);
}

TEST_CASE("config validation") {
  UniformBoundConfig c;
  c.gammas = {0.0, 0.5};
  CHECK_THROWS_AS(c.validate(), InputError);
  c = UniformBoundConfig{};
  c.sample_multipliers = {};
  CHECK_THROWS_AS(c.validate(), InputError);
  c = UniformBoundConfig{};
  c.tolerance = 0.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = UniformBoundConfig{};
  c.eta = -1.0;
  CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("tail bound decays and is monotone") {
  const auto c = fdr_config(0.01);
  CHECK(tail_bound_upper(10.0, 10000, c) < 1e-6);
  double prev = 1.0;
  for (int k = 1; k <= 500; ++k) {
    const double t = 0.01 * k;
    double b = 1.0;
    try {
      b = tail_bound_upper(t, 1000, c);
    } catch (const InputError&) {
    }
    CHECK(b >= 0.0);
    CHECK(b <= prev + 1e-15);
    prev = b;
  }
}

TEST_CASE("tail bound grows with the growth function") {
  auto small = fdr_config(0.01), large = fdr_config(0.01);
  small.growth = GrowthFunction::finite_grid(10);
  large.growth = GrowthFunction::finite_grid(10000);
  for (double t : {0.05, 0.1, 0.2}) {
    CHECK(tail_bound_upper(t, 5000, small) <= tail_bound_upper(t, 5000, large));
  }
}

TEST_CASE("solve_t") {
  const auto c = fdr_config(0.01);
  const double t = solve_t(0.01, 0.1, 5000, c);
  CHECK(std::abs(tail_bound_upper(t, 5000, c) - 0.1) <= 1e-6);
  CHECK(tail_bound_upper(t, 5000, c) <= 0.1);
  double prev = 1.0;
  for (double d : {0.01, 0.02, 0.05, 0.1, 0.2, 0.4}) {
    const double td = solve_t(0.01, d, 5000, c);
    CHECK(td <= prev + 1e-12);
    prev = td;
  }
  CHECK_THROWS_WITH_AS(solve_t(0.01, 0.1, 5, c), doctest::Contains("sample size too small"),
                       InputError);
}

TEST_CASE("upper confidence bound") {
  CHECK(upper_confidence_bound(0.3, 0.0, 0.1) == 0.3);
  CHECK(upper_confidence_bound(0.0, 0.1, 0.0) == doctest::Approx(0.01));
  for (double r : {0.0, 0.2, 0.9}) CHECK(upper_confidence_bound(r, 0.05, 0.01) >= r);
}

TEST_CASE("optimal eta") {
  auto c = fdr_config(0.0);
  const auto best = optimal_eta(0.2, 0.1, 10000, c);
  CHECK(best.x < 0.2);
  CHECK(best.x > 0.0);
  for (int k = 0; k < 25; ++k) {
    const double eta = std::exp(std::log(1e-4) * (1.0 - k / 24.0));
    double x = -1.0;
    try {
      x = certifiable_risk(eta, 0.2, 0.1, 10000, c);
    } catch (const InputError&) {
    }
    CHECK(best.x >= x);
  }
  CHECK_THROWS_AS(optimal_eta(0.01, 0.1, 50, c), InputError);
}

TEST_CASE("calibrate uniform") {
  const std::size_t n = 20000, N = 20;
  const auto grid = ParameterGrid::uniform_unit(N);
  UniformBoundConfig c;
  c.growth = GrowthFunction::finite_grid(N);
  const LossTensor zeros(n, N, 1, true);
  const auto all = calibrate_uniform(zeros, grid, 0.1, 0.1, c);
  REQUIRE(all.selected);
  CHECK(*all.selected == 0);
  CHECK(all.certified.size() == N);

  LossTensor ones(n, N, 1, true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < N; ++j) ones.at(i, j) = 1.0;
  }
  const auto none = calibrate_uniform(ones, grid, 0.1, 0.1, c);
  CHECK(!none.selected);
  CHECK(none.certified.empty());

  // alpha unreachable: nothing certified, no error
  const LossTensor tiny(5, N, 1, true);
  CHECK(!calibrate_uniform(tiny, grid, 0.1, 0.1, c).selected);
}
