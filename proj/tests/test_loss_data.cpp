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
#include <sstream>

#include "riskcal/error.hpp"
#include "riskcal/loss_data.hpp"
#include "riskcal/random.hpp"
#include "riskcal/simulation.hpp"

using namespace riskcal;

TEST_CASE("grid construction and validation") {
  const auto g = ParameterGrid::uniform_unit(4);
  CHECK(g.size() == 4);
  CHECK(g.coord(0, 0) == 0.25);
  CHECK(g.coord(3, 0) == 1.0);

  const auto p = ParameterGrid::product({{0.1, 0.2}, {1.0, 2.0, 3.0}});
  CHECK(p.size() == 6);
  CHECK(p.dim() == 2);
  CHECK(p.coord(4, 0) == 0.2);
  CHECK(p.coord(4, 1) == 2.0);
  const std::vector<std::size_t> idx{1, 1};
  CHECK(p.flatten(idx) == 4);
  CHECK(p.unflatten(5) == std::vector<std::size_t>{1, 2});

  CHECK_THROWS_AS(ParameterGrid(1, {}), InputError);
  CHECK_THROWS_AS(ParameterGrid(2, {0.1, 0.2, 0.3}), InputError);
  CHECK_THROWS_AS(ParameterGrid::product({{0.2, 0.2}, {1.0}}), InputError);
  CHECK_THROWS_AS(ParameterGrid(1, {0.1, 0.2}, std::vector<std::size_t>{3}), InputError);
}

TEST_CASE("grid json round trip") {
  const auto p = ParameterGrid::product({{0.1, 0.2}, {1.0, 2.0, 3.0}});
  CHECK(grid_from_json(grid_to_json(p)) == p);
  CHECK_THROWS_AS(grid_from_json("{"), InputError);
}

TEST_CASE("load a 2x2 zero csv") {
  std::istringstream in("# n=2 N=2 m=1 bounded=1\n0,0\n0,0\n");
  const LossTensor t = load_loss_csv(in);
  CHECK(t.n() == 2);
  CHECK(t.grid_size() == 2);
  CHECK(t.risks() == 1);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) CHECK(t(i, j) == 0.0);
  }
}

TEST_CASE("csv errors") {
  auto load = [](const std::string& s) {
    std::istringstream in(s);
    return load_loss_csv(in);
  };
  try {
    load("# n=1 N=2 m=1 bounded=1\n0,1.2\n");
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("entry out of unit interval") != std::string::npos);
  }
  CHECK_THROWS_AS(load("n=1 N=2\n0,1\n"), InputError);
  CHECK_THROWS_AS(load("# n=1 N=2 m=1 bounded=1\n0,abc\n"), InputError);
  CHECK_THROWS_AS(load("# n=2 N=2 m=1 bounded=1\n0,0\n"), InputError);
  CHECK_THROWS_AS(load("# n=1 N=2 m=1 bounded=1\n0\n"), InputError);
  CHECK_THROWS_AS(load("# n=1 N=2 m=1 bounded=1\n0,0\n0,0\n"), InputError);
  CHECK_NOTHROW(load("# n=1 N=2 m=1 bounded=0\n0,7.5\n"));

  const auto grid = ParameterGrid::uniform_unit(3);
  std::istringstream in("# n=1 N=2 m=1 bounded=1\n0,0\n");
  CHECK_THROWS_AS(load_loss_csv(in, &grid), InputError);
}

TEST_CASE("save and load round-trip bit-exactly") {
  ARConfig c;
  c.n = 300;
  c.target_risk = v_shape_curve(40, 0.25, 0.05);
  c.seed = 9;
  const LossTensor a = simulate_ar(c);
  LossTensor b = LossTensor::stack({a, a});
  std::ostringstream out;
  save_loss_csv(b, out);
  std::istringstream in(out.str());
  const LossTensor back = load_loss_csv(in);
  CHECK(back == b);
  std::ostringstream again;
  save_loss_csv(back, again);
  CHECK(again.str() == out.str());
}

TEST_CASE("format_double is shortest round trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("empirical risk") {
  LossTensor z(3, 2, 1, true);
  auto s = empirical_risk(z);
  CHECK(s.r_hat(0) == 0.0);
  CHECK(s.sigma_hat(1) == 0.0);

  LossTensor two(2, 1, 1, std::vector<double>{0.0, 1.0}, {true});
  s = empirical_risk(two);
  CHECK(s.r_hat(0) == 0.5);
  CHECK(s.sigma_hat(0) == doctest::Approx(std::sqrt(0.5)));

  LossTensor one(1, 1, 1, std::vector<double>{0.4}, {true});
  CHECK(empirical_risk(one).sigma_hat(0) == 0.0);

  const std::size_t n = 100000;
  LossTensor bern(n, 1, 1, true);
  Philox rng(5, 0);
  for (std::size_t i = 0; i < n; ++i) bern.at(i, 0) = rng.uniform() < 0.3 ? 1.0 : 0.0;
  CHECK(std::abs(empirical_risk(bern).r_hat(0) - 0.3) < 0.005);
}

TEST_CASE("RiskSpec validation") {
  CHECK_NOTHROW(RiskSpec{{0.1}, 0.1}.validate(1));
  CHECK_THROWS_AS((RiskSpec{{0.1}, 0.1}.validate(2)), InputError);
  CHECK_THROWS_AS((RiskSpec{{1.0}, 0.1}.validate(1)), InputError);
  CHECK_THROWS_AS((RiskSpec{{0.1}, 0.0}.validate(1)), InputError);
}

TEST_CASE("pfdr transform") {
  LossTensor v0(1, 2, 1, true), r0(1, 2, 1, true);
  auto t = pfdr_transform(v0, r0, 0.15);
  CHECK(t(0, 0) == doctest::Approx(0.15));
  CHECK(t(0, 1) == doctest::Approx(0.15));

  LossTensor v1(1, 1, 1, std::vector<double>{1.0}, {true});
  LossTensor r1(1, 1, 1, std::vector<double>{1.0}, {true});
  CHECK(pfdr_transform(v1, r1, 0.15)(0, 0) == doctest::Approx(1.0));

  LossTensor bad_r(1, 1, 1, std::vector<double>{0.5}, {true});
  CHECK_THROWS_AS(pfdr_transform(LossTensor(1, 1, 1, true), bad_r, 0.1), InputError);
  LossTensor v_big(1, 1, 1, std::vector<double>{0.5}, {true});
  LossTensor r_zero(1, 1, 1, std::vector<double>{0.0}, {true});
  CHECK_THROWS_AS(pfdr_transform(v_big, r_zero, 0.1), InputError);

  // two-point distribution r = (1, 1), v = (1, 0), alpha = 0.5
  LossTensor v(2, 1, 1, std::vector<double>{1.0, 0.0}, {true});
  LossTensor r(2, 1, 1, std::vector<double>{1.0, 1.0}, {true});
  CHECK(empirical_risk(pfdr_transform(v, r, 0.5)).r_hat(0) == doctest::Approx(0.5));
}

TEST_CASE("pfdr transform stays in the unit interval") {
  Philox rng(77, 0);
  for (int rep = 0; rep < 50; ++rep) {
    LossTensor v(20, 5, 1, true), r(20, 5, 1, true);
    for (std::size_t i = 0; i < 20; ++i) {
      for (std::size_t j = 0; j < 5; ++j) {
        const double ind = rng.uniform() < 0.7 ? 1.0 : 0.0;
        r.at(i, j) = ind;
        v.at(i, j) = ind * rng.uniform();
      }
    }
    const double alpha = 0.05 + 0.9 * rng.uniform();
    const auto t = pfdr_transform(v, r, alpha);
    for (std::size_t i = 0; i < 20; ++i) {
      for (std::size_t j = 0; j < 5; ++j) {
        CHECK(t(i, j) >= 0.0);
        CHECK(t(i, j) <= 1.0);
      }
    }
  }
}
