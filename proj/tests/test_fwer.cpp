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

#include "riskcal/error.hpp"
#include "riskcal/fwer.hpp"
#include "riskcal/random.hpp"

using namespace riskcal;

namespace {

PValueVector pv(std::vector<double> p) { return {std::move(p), PValueMethod::kHoeffdingBentkus}; }

PValueVector random_p(Philox& rng, std::size_t n, double scale) {
  PValueVector p;
  for (std::size_t j = 0; j < n; ++j) p.p.push_back(std::pow(rng.uniform(), 3.0) * scale);
  return p;
}

}  // namespace

TEST_CASE("bonferroni") {
  CHECK(bonferroni(pv({0.001, 0.2, 0.004}), 0.05).indices == std::vector<std::size_t>{0, 2});
  CHECK(bonferroni(pv({1.0, 1.0}), 0.05).empty());
  CHECK_THROWS_AS(bonferroni(pv({0.1}), 1.0), InputError);
}

TEST_CASE("holm") {
  CHECK(holm(pv({0.001, 0.2, 0.004}), 0.05).indices == std::vector<std::size_t>{0, 2});
  CHECK(holm(pv({0.05}), 0.05).indices == std::vector<std::size_t>{0});
  CHECK(holm(pv({0.051}), 0.05).empty());
  // 0.02 <= 0.05/2 but bonferroni needs 0.0167
  CHECK(holm(pv({0.001, 0.02, 0.03}), 0.05).indices == std::vector<std::size_t>{0, 1, 2});
  Philox rng(1, 0);
  for (int k = 0; k < 500; ++k) {
    const auto p = random_p(rng, 1 + k % 17, 0.2);
    const auto h = holm(p, 0.1), b = bonferroni(p, 0.1);
    CHECK(std::includes(h.indices.begin(), h.indices.end(), b.indices.begin(), b.indices.end()));
  }
}

TEST_CASE("fixed sequence") {
  const auto p = pv({0.01, 0.02, 0.2, 0.01});
  CHECK(fixed_sequence(p, 0.05, {0}).indices == std::vector<std::size_t>{0, 1});
  CHECK(fixed_sequence(p, 0.1, {0, 2}).indices == std::vector<std::size_t>{0, 1});
  CHECK(fixed_sequence(p, 0.1, {0, 0}).indices == std::vector<std::size_t>{0, 1});
  CHECK(fixed_sequence(p, 0.05, {3}).indices == std::vector<std::size_t>{3});
  CHECK_THROWS_AS(fixed_sequence(p, 0.05, {}), InputError);
  CHECK_THROWS_AS(fixed_sequence(p, 0.05, {4}), InputError);
}

TEST_CASE("fixed sequence output is a union of runs from the starts") {
  Philox rng(2, 0);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = 2 + k % 20;
    const auto p = random_p(rng, n, 0.1);
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s < 1 + k % 4; ++s) starts.push_back(rng.next_u32() % n);
    const auto r = fixed_sequence(p, 0.1, starts);
    for (std::size_t j : r.indices) {
      // walk back to a start through rejected nodes
      std::size_t i = j;
      bool reached = false;
      while (true) {
        if (std::find(starts.begin(), starts.end(), i) != starts.end()) {
          reached = true;
          break;
        }
        if (i == 0 || !r.contains(i - 1)) break;
        --i;
      }
      CHECK(reached);
    }
    CHECK(replay(r) == r.indices);
  }
}

TEST_CASE("test graph validation") {
  CHECK_NOTHROW(TestGraph({0.05, 0.0}, {{0, 1, 1.0}}));
  CHECK_THROWS_AS(TestGraph({-0.01, 0.06}, {}), InputError);
  CHECK_THROWS_AS(TestGraph({0.05}, {{0, 0, 1.0}}), InputError);
  CHECK_THROWS_AS(TestGraph({0.05, 0.0}, {{0, 1, 1.5}}), InputError);
  CHECK_THROWS_AS(TestGraph({0.05, 0.0, 0.0}, {{0, 1, 0.6}, {0, 2, 0.6}}), InputError);
  CHECK_THROWS_AS(TestGraph({0.05, 0.0}, {{0, 1, 0.5}, {0, 1, 0.5}}), InputError);
  CHECK_THROWS_AS(TestGraph({0.0, 0.0}, {}), InputError);
  const TestGraph g({0.05, 0.0}, {{0, 1, 1.0}});
  const TestGraph back = graph_from_json(graph_to_json(g));
  CHECK(back.budgets() == g.budgets());
  CHECK(back.weight(0, 1) == 1.0);
}

TEST_CASE("sgt two-node example") {
  const TestGraph g({0.05, 0.0}, {{0, 1, 1.0}});
  const auto r = sgt(pv({0.02, 0.045}), g);
  CHECK(r.indices == std::vector<std::size_t>{0, 1});
  CHECK(replay(r) == r.indices);
  CHECK(sgt(pv({0.06, 0.001}), g).empty());
}

TEST_CASE("sgt weight update with a cycle") {
  // 0 <-> 1 with weight 1 each way, 2 fed by 1 with weight 0.5
  const TestGraph g({0.02, 0.02, 0.0}, {{0, 1, 1.0}, {1, 0, 0.5}, {1, 2, 0.5}});
  const auto r = sgt(pv({0.015, 0.035, 0.02}), g);
  // Rejecting 0 gives 1 a budget of 0.04 and renormalizes 1 -> 2 to weight 1, so 2 then
  // receives the full 0.04.
  CHECK(r.indices == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("fallback graph") {
  const auto chain = build_fallback_graph(1, 3, 0.1);
  CHECK(chain.budgets() == std::vector<double>{0.0, 0.0, 0.1});
  CHECK(chain.weight(2, 1) == 1.0);
  CHECK(chain.weight(1, 0) == 1.0);
  CHECK(chain.edges().size() == 2);

  const auto two = build_fallback_graph(2, 1, 0.1);
  CHECK(two.budgets() == std::vector<double>{0.05, 0.05});
  CHECK(two.weight(0, 1) == 1.0);

  for (std::size_t K = 1; K <= 5; ++K) {
    for (std::size_t M = 1; M <= 5; ++M) {
      const auto g = build_fallback_graph(K, M, 0.1);
      CHECK(g.delta() == doctest::Approx(0.1));
      for (std::size_t i = 0; i < g.size(); ++i) {
        double s = 0.0;
        for (const auto& [t, w] : g.out(i)) s += w;
        CHECK(s <= 1.0 + 1e-12);
      }
    }
  }
  // on a chain the fallback procedure equals fixed sequence from the head
  Philox rng(8, 0);
  for (int k = 0; k < 200; ++k) {
    auto p = random_p(rng, 6, 0.15);
    const auto s = sgt(p, build_fallback_graph(1, 6, 0.1));
    const std::vector<std::size_t> order{5, 4, 3, 2, 1, 0};
    CHECK(s.indices == fixed_sequence_ordered(p, 0.1, order, {0}).indices);
  }
}

TEST_CASE("hamming graph weights") {
  const std::size_t side = 4;
  const auto g = build_hamming_graph(side, 0.1);
  const auto node = [&](std::size_t i, std::size_t j) { return hamming_node(side, i, j); };
  CHECK(g.budgets()[node(1, 1)] == 0.1);
  CHECK(g.delta() == doctest::Approx(0.1));
  CHECK(g.weight(node(1, 1), node(1, 2)) == doctest::Approx(0.5));
  CHECK(g.weight(node(1, 1), node(2, 1)) == doctest::Approx(0.5));
  CHECK(g.weight(node(1, 2), node(1, 3)) == doctest::Approx(2.0 / 3.0));
  CHECK(g.weight(node(1, 2), node(2, 2)) == doctest::Approx(1.0 / 3.0));
  CHECK(g.weight(node(4, 1), node(4, 2)) == 1.0);
  CHECK(g.weight(node(2, 4), node(3, 4)) == 1.0);
  CHECK(g.weight(node(4, 4), node(4, 3)) == 0.0);
  CHECK(hamming_node(side, 1, 1) == side * side - 1);
}

TEST_CASE("cascaded 2-D fixed sequence") {
  const std::size_t K = 3, M = 4;
  const auto zero = cascaded_2d_fixed_sequence(pv(std::vector<double>(K * M, 0.0)), K, M, 0.1);
  std::vector<std::size_t> expected;
  for (std::size_t c = 0; c < M; ++c) expected.push_back(c);  // row 0 after walking all rows
  for (std::size_t r = 1; r < K; ++r) expected.push_back(r * M + M - 1);
  std::sort(expected.begin(), expected.end());
  CHECK(zero.indices == expected);
  CHECK(cascaded_2d_fixed_sequence(pv(std::vector<double>(K * M, 0.06)), K, M, 0.1).empty());
  CHECK_THROWS_AS(cascaded_2d_fixed_sequence(pv({0.0, 0.0}), 2, 2, 0.1), InputError);
}

TEST_CASE("split fixed sequence ordering") {
  PValueMatrix g{3, 1, {0.9, 0.5, 0.1}, PValueMethod::kHoeffdingBentkus};
  CHECK(learn_split_ordering(g, 2) == std::vector<std::size_t>{2, 1, 0});
  PValueMatrix flat{3, 1, {0.4, 0.4, 0.4}, PValueMethod::kHoeffdingBentkus};
  CHECK(learn_split_ordering(flat, 10) == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(learn_split_ordering(g, 0), InputError);
  const auto r = split_fixed_sequence(g, pv({0.2, 0.01, 0.01}), 2, 0.05);
  CHECK(r.ordering == std::vector<std::size_t>{2, 1, 0});
  CHECK(r.rejections.indices == std::vector<std::size_t>{1, 2});
}

TEST_CASE("rejection json carries the audit log") {
  const auto r = bonferroni(pv({0.001, 0.5}), 0.05);
  const std::string js = rejection_to_json(r);
  CHECK(js.find("\"rejected\":[0]") != std::string::npos);
  CHECK(js.find("\"log\"") != std::string::npos);
}
