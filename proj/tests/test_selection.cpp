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

#include <algorithm>
#include <cmath>

#include "riskcal/random.hpp"
#include "riskcal/selection.hpp"

using namespace riskcal;

namespace {

RejectionSet set_of(std::vector<std::size_t> idx) {
  RejectionSet r;
  r.indices = std::move(idx);
  return r;
}

}  // namespace

TEST_CASE("select_sup") {
  const auto grid = ParameterGrid::line({0.1, 0.2, 0.3, 0.4, 0.5});
  CHECK(select_sup(set_of({2, 3, 4}), grid) == 4u);
  CHECK(!select_sup(set_of({}), grid));
  CHECK(select_lexicographic(set_of({1, 3}), grid, {SelectionStage::extremum(0, true)}) ==
        select_sup(set_of({1, 3}), grid));
}

TEST_CASE("select_sup on random sets") {
  const auto grid = ParameterGrid::product({{0.1, 0.2, 0.3, 0.4}, {1, 2, 3}});
  Philox rng(6, 0);
  for (int k = 0; k < 200; ++k) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (rng.uniform() < 0.4) idx.push_back(j);
    }
    const auto axis = static_cast<std::size_t>(k % 2);
    const auto s = select_sup(set_of(idx), grid, axis);
    if (idx.empty()) {
      CHECK(!s);
      continue;
    }
    REQUIRE(s);
    CHECK(std::find(idx.begin(), idx.end(), *s) != idx.end());
    for (std::size_t j : idx) CHECK(grid.coord(*s, axis) >= grid.coord(j, axis));
  }
}

TEST_CASE("three-stage detection rule") {
  // Points (0.3, 0.5, 0.99), (0.4, 0.5, 0.992), (0.4, 0.6, 0.992) on a 3-D grid.
  const auto grid = ParameterGrid::product({{0.3, 0.4}, {0.5, 0.6}, {0.99, 0.992}});
  const std::vector<std::size_t> a{0, 0, 0}, b{1, 0, 1}, c{1, 1, 1};
  const auto ia = grid.flatten(a), ib = grid.flatten(b), ic = grid.flatten(c);
  RiskSummary summary{grid.size(), 2, std::vector<double>(grid.size() * 2, 0.1),
                      std::vector<double>(grid.size() * 2, 0.0)};
  const auto rule = detection_rule(1);
  CHECK(select_lexicographic(set_of({ib, ia, ic}), grid, rule.stages, &summary) == ia);
}

TEST_CASE("objective stage and final tie-break") {
  const auto grid = ParameterGrid::product({{0.1, 0.2}, {0.1, 0.2, 0.3}});
  RiskSummary summary{6, 1, {0.5, 0.2, 0.2, 0.3, 0.2, 0.1}, std::vector<double>(6, 0.0)};
  const std::vector<SelectionStage> st{SelectionStage::objective(0, false)};
  CHECK(select_lexicographic(set_of({0, 1, 2, 4}), grid, st, &summary) == 1u);
  const std::vector<SelectionStage> st2{SelectionStage::objective(0, false),
                                        SelectionStage::extremum(1, true)};
  CHECK(select_lexicographic(set_of({0, 1, 2, 4}), grid, st2, &summary) == 2u);
  CHECK_THROWS_AS(select_lexicographic(set_of({0}), grid, st, nullptr), InputError);
}

TEST_CASE("unsatisfiable filter") {
  const auto grid = ParameterGrid::line({0.1, 0.2});
  const std::vector<SelectionStage> st{SelectionStage::filter({1.0}, 0.0, true)};  // lambda < 0
  CHECK_THROWS_AS(select_lexicographic(set_of({0, 1}), grid, st), UnsatisfiableSelection);
  CHECK(!select_lexicographic(set_of({}), grid, st));
}

TEST_CASE("lexicographic selection is permutation invariant and lands in the set") {
  const auto grid = ParameterGrid::product({{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}, {0.5, 0.9}});
  Philox rng(10, 0);
  RiskSummary summary{grid.size(), 2, {}, std::vector<double>(grid.size() * 2, 0.0)};
  for (std::size_t k = 0; k < grid.size() * 2; ++k) {
    summary.mean.push_back(std::floor(rng.uniform() * 4) / 4);
  }
  const auto rule = detection_rule(1);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (rng.uniform() < 0.3) idx.push_back(j);
    }
    std::optional<std::size_t> first;
    bool threw = false;
    try {
      first = select_lexicographic(set_of(idx), grid, rule.stages, &summary);
    } catch (const UnsatisfiableSelection&) {
      threw = true;
    }
    std::vector<std::size_t> shuffled = idx;
    std::reverse(shuffled.begin(), shuffled.end());
    if (shuffled.size() > 2) std::swap(shuffled[0], shuffled[shuffled.size() / 2]);
    if (threw) {
      CHECK_THROWS_AS(select_lexicographic(set_of(shuffled), grid, rule.stages, &summary),
                      UnsatisfiableSelection);
      continue;
    }
    CHECK(select_lexicographic(set_of(shuffled), grid, rule.stages, &summary) == first);
    if (first) CHECK(std::find(idx.begin(), idx.end(), *first) != idx.end());
  }
}

TEST_CASE("selection rules round-trip through json") {
  const auto rule = detection_rule(1);
  const auto back = selection_rule_from_json(selection_rule_to_json(rule));
  CHECK(back.name == "detection");
  REQUIRE(back.stages.size() == rule.stages.size());
  CHECK(back.stages[0].coefficients == rule.stages[0].coefficients);
  CHECK(back.stages[1].maximize == false);
  CHECK_THROWS_AS(selection_rule_from_json("{\"stages\":[{\"type\":\"nope\"}]}"), InputError);
  CHECK_THROWS_AS(selection_rule_from_json("[1,"), InputError);
  CHECK_THROWS_AS(load_selection_rule("/nonexistent/rule.json"), InputError);
}
