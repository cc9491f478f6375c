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

#include "riskcal/fwer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <json.hpp>

#include "riskcal/error.hpp"

namespace riskcal {

using nlohmann::json;

namespace {

constexpr double kSumTolerance = 1e-12;
constexpr double kDenominatorGuard = 1e-12;

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
}

RejectionSet make_set(std::string procedure, double delta) {
  RejectionSet out;
  out.procedure = std::move(procedure);
  out.delta = delta;
  return out;
}

void finalize(RejectionSet& set) {
  std::sort(set.indices.begin(), set.indices.end());
  set.indices.erase(std::unique(set.indices.begin(), set.indices.end()), set.indices.end());
}

}  // namespace

bool RejectionSet::contains(std::size_t j) const {
  return std::binary_search(indices.begin(), indices.end(), j);
}

std::vector<std::size_t> replay(const RejectionSet& set) {
  std::vector<std::size_t> out;
  for (const auto& e : set.log) {
    if (e.rejected) out.push_back(e.index);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// TestGraph -----------------------------------------------------------------

TestGraph::TestGraph(std::vector<double> budgets, std::vector<Edge> edges)
    : budgets_(std::move(budgets)), out_(budgets_.size()) {
  if (budgets_.empty()) throw InputError("test graph needs at least one node");
  for (double b : budgets_) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw InputError("node budgets must be nonnegative");
  }
  for (const Edge& e : edges) {
    if (e.from >= size() || e.to >= size()) throw InputError("edge endpoint out of range");
    if (e.from == e.to) throw InputError("self-loops are not allowed (diagonal must be zero)");
    if (!(e.weight >= 0.0 && e.weight <= 1.0)) throw InputError("edge weights must lie in [0, 1]");
    if (e.weight == 0.0) continue;
    out_[e.from].emplace_back(e.to, e.weight);
  }
  for (std::size_t i = 0; i < size(); ++i) {
    auto& row = out_[i];
    std::sort(row.begin(), row.end());
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (row[k].first == row[k - 1].first) throw InputError("duplicate edge in test graph");
    }
    double total = 0.0;
    for (const auto& [to, w] : row) total += w;
    if (total > 1.0 + kSumTolerance) {
      throw InputError("outgoing weights of node " + std::to_string(i) + " sum above 1");
    }
  }
  const double d = delta();
  if (!(d > 0.0 && d < 1.0 + kSumTolerance)) throw InputError("budgets must sum to delta in (0, 1)");
}

double TestGraph::delta() const { return std::accumulate(budgets_.begin(), budgets_.end(), 0.0); }

double TestGraph::weight(std::size_t from, std::size_t to) const {
  const auto& row = out_.at(from);
  auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(to, -1.0));
  return (it != row.end() && it->first == to) ? it->second : 0.0;
}

std::vector<Edge> TestGraph::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < size(); ++i) {
    for (const auto& [to, w] : out_[i]) out.push_back({i, to, w});
  }
  return out;
}

std::string graph_to_json(const TestGraph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.from, e.to, e.weight});
  json doc;
  doc["n"] = g.size();
  doc["budgets"] = g.budgets();
  doc["edges"] = std::move(edges);
  return doc.dump();
}

TestGraph graph_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    const auto n = doc.at("n").get<std::size_t>();
    auto budgets = doc.at("budgets").get<std::vector<double>>();
    if (budgets.size() != n) throw InputError("graph JSON: budgets length differs from n");
    std::vector<Edge> edges;
    for (const auto& e : doc.value("edges", json::array())) {
      if (!e.is_array() || e.size() != 3) throw InputError("graph JSON: edges must be [i, j, w]");
      edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
    }
    return TestGraph(std::move(budgets), std::move(edges));
  } catch (const json::exception& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
}

// Single-step procedures ----------------------------------------------------

RejectionSet bonferroni(const PValueVector& p, double delta) {
  check_delta(delta);
  auto out = make_set("bonferroni", delta);
  const double level = delta / static_cast<double>(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const bool reject = p[j] <= level;
    out.log.push_back({j, level, p[j], reject, 0.0, {}});
    if (reject) out.indices.push_back(j);
  }
  return out;
}

RejectionSet holm(const PValueVector& p, double delta) {
  check_delta(delta);
  auto out = make_set("holm", delta);
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  const auto n = static_cast<double>(p.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double level = delta / (n - static_cast<double>(k));
    const std::size_t j = order[k];
    const bool reject = p[j] <= level;
    out.log.push_back({j, level, p[j], reject, 0.0, {}});
    if (!reject) break;
    out.indices.push_back(j);
  }
  finalize(out);
  return out;
}

RejectionSet fixed_sequence_ordered(const PValueVector& p, double delta,
                                    const std::vector<std::size_t>& ordering,
                                    const std::vector<std::size_t>& start_positions) {
  check_delta(delta);
  if (start_positions.empty()) throw InputError("fixed sequence needs at least one start");
  for (std::size_t j : ordering) {
    if (j >= p.size()) throw InputError("ordering index out of range");
  }
  std::vector<std::size_t> starts = start_positions;
  for (std::size_t s : starts) {
    if (s >= ordering.size()) throw InputError("start position out of range");
  }
  // Starts form a set; keep first-occurrence order.
  {
    std::set<std::size_t> seen;
    std::vector<std::size_t> unique;
    for (std::size_t s : starts) {
      if (seen.insert(s).second) unique.push_back(s);
    }
    starts.swap(unique);
  }

  auto out = make_set("fixed-sequence", delta);
  const double level = delta / static_cast<double>(starts.size());
  std::vector<char> rejected(p.size(), 0);
  for (std::size_t s : starts) {
    if (rejected[ordering[s]]) continue;
    for (std::size_t pos = s; pos < ordering.size(); ++pos) {
      const std::size_t j = ordering[pos];
      const bool reject = p[j] <= level;
      out.log.push_back({j, level, p[j], reject, 0.0, {}});
      if (!reject) break;
      if (!rejected[j]) {
        rejected[j] = 1;
        out.indices.push_back(j);
      }
    }
  }
  finalize(out);
  return out;
}

RejectionSet fixed_sequence(const PValueVector& p, double delta,
                            const std::vector<std::size_t>& starts) {
  std::vector<std::size_t> identity(p.size());
  std::iota(identity.begin(), identity.end(), 0);
  return fixed_sequence_ordered(p, delta, identity, starts);
}

// Sequential graphical testing ---------------------------------------------

RejectionSet sgt(const PValueVector& p, const TestGraph& graph) {
  const std::size_t n = graph.size();
  if (p.size() != n) throw InputError("p-value count does not match graph size");
  const double total_delta = graph.delta();

  std::vector<double> budget = graph.budgets();
  std::vector<std::map<std::size_t, double>> out(n);
  std::vector<std::set<std::size_t>> in(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [to, w] : graph.out(i)) {
      out[i].emplace(to, w);
      in[to].insert(i);
    }
  }

  std::vector<char> rejected(n, 0);
  std::set<std::size_t> eligible;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] <= budget[i]) eligible.insert(i);
  }
  double remaining = total_delta;

  auto result = make_set("sgt", total_delta);
  while (!eligible.empty()) {
    const std::size_t i = *eligible.begin();
    eligible.erase(eligible.begin());
    rejected[i] = 1;
    result.indices.push_back(i);

    AuditEvent event{i, budget[i], p[i], true, 0.0, {}};
    const double spent = budget[i];
    const auto row_i = out[i];  // copy: rows of predecessors are rewritten below

    // Budget flows along i's outgoing edges.
    for (const auto& [j, w] : row_i) {
      if (rejected[j]) continue;
      budget[j] += spent * w;
      event.budget_updates.emplace_back(j, budget[j]);
      if (p[j] <= budget[j]) eligible.insert(j);
    }
    budget[i] = 0.0;

    // Predecessors k of i inherit i's edges: g_kj <- (g_kj + g_ki g_ij) / (1 - g_ki g_ik).
    const std::vector<std::size_t> preds(in[i].begin(), in[i].end());
    for (std::size_t k : preds) {
      if (rejected[k]) continue;
      auto& row_k = out[k];
      const double g_ki = row_k.at(i);
      const auto back = row_i.find(k);
      const double g_ik = back == row_i.end() ? 0.0 : back->second;
      const double denom = 1.0 - g_ki * g_ik;
      row_k.erase(i);
      if (denom <= kDenominatorGuard) {
        for (const auto& [j, w] : row_k) in[j].erase(k);
        row_k.clear();
        continue;
      }
      for (const auto& [j, w] : row_i) {
        if (j == k || rejected[j]) continue;
        auto [it, inserted] = row_k.emplace(j, 0.0);
        it->second += g_ki * w;
        if (inserted) in[j].insert(k);
      }
      for (auto& [j, w] : row_k) w /= denom;
    }
    for (const auto& [j, w] : row_i) in[j].erase(i);
    out[i].clear();
    in[i].clear();

    // Unrejected total: i's budget leaves, the forwarded share stays.
    remaining -= spent;
    for (const auto& [j, w] : row_i) {
      if (!rejected[j]) remaining += spent * w;
    }
    event.remaining_budget = remaining;
    result.log.push_back(std::move(event));
  }
  finalize(result);
  return result;
}

// Graph builders ------------------------------------------------------------

TestGraph build_fallback_graph(std::size_t rows, std::size_t cols, double delta) {
  check_delta(delta);
  if (rows == 0 || cols == 0) throw InputError("fallback graph needs K, M >= 1");
  const std::size_t n = rows * cols;
  std::vector<double> budgets(n, 0.0);
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t head = r * cols + (cols - 1);
    budgets[head] = delta / static_cast<double>(rows);
    for (std::size_t c = cols - 1; c > 0; --c) {
      edges.push_back({r * cols + c, r * cols + c - 1, 1.0});
    }
    if (r + 1 < rows) edges.push_back({r * cols, (r + 1) * cols + (cols - 1), 1.0});
  }
  return TestGraph(std::move(budgets), std::move(edges));
}

TestGraph build_hamming_graph(std::size_t side, double delta) {
  check_delta(delta);
  if (side < 2) throw InputError("Hamming graph needs N_side >= 2");
  const std::size_t n = side * side;
  std::vector<double> budgets(n, 0.0);
  budgets[hamming_node(side, 1, 1)] = delta;
  std::vector<Edge> edges;
  for (std::size_t i = 1; i <= side; ++i) {
    for (std::size_t j = 1; j <= side; ++j) {
      const std::size_t from = hamming_node(side, i, j);
      const auto di = static_cast<double>(i), dj = static_cast<double>(j);
      double right = 0.0, up = 0.0;  // toward (i, j+1) and (i+1, j)
      if (i + j <= side) {
        right = dj / (di + dj);
        up = di / (di + dj);
      } else if (i == side) {
        right = 1.0;
      } else {
        up = 1.0;
      }
      if (right > 0.0 && j < side) edges.push_back({from, hamming_node(side, i, j + 1), right});
      if (up > 0.0 && i < side) edges.push_back({from, hamming_node(side, i + 1, j), up});
    }
  }
  return TestGraph(std::move(budgets), std::move(edges));
}

// Structured fixed-sequence variants ---------------------------------------

RejectionSet cascaded_2d_fixed_sequence(const PValueVector& p, std::size_t rows,
                                        std::size_t cols, double delta) {
  check_delta(delta);
  if (rows == 0 || cols == 0 || rows * cols != p.size()) {
    throw InputError("cascaded 2-D fixed sequence needs a K x M shape matching the p-values");
  }
  auto out = make_set("cascade-2d", delta);
  const double level = delta / 2.0;

  std::size_t last_row = rows;  // sentinel: nothing rejected
  for (std::size_t r = rows; r-- > 0;) {
    const std::size_t j = r * cols + (cols - 1);
    const bool reject = p[j] <= level;
    out.log.push_back({j, level, p[j], reject, 0.0, {}});
    if (!reject) break;
    out.indices.push_back(j);
    last_row = r;
  }
  if (last_row == rows) return out;

  for (std::size_t c = cols; c-- > 0;) {
    const std::size_t j = last_row * cols + c;
    const bool reject = p[j] <= level;
    out.log.push_back({j, level, p[j], reject, 0.0, {}});
    if (!reject) break;
    out.indices.push_back(j);
  }
  finalize(out);
  return out;
}

std::vector<std::size_t> learn_split_ordering(const PValueMatrix& p_graph, std::size_t D) {
  if (D == 0) throw InputError("split fixed sequence needs D >= 1");
  if (p_graph.grid_size == 0) throw InputError("split fixed sequence needs a non-empty grid");
  std::vector<std::size_t> ordering;
  std::vector<char> seen(p_graph.grid_size, 0);
  for (std::size_t d = 0; d <= D; ++d) {
    const double beta = static_cast<double>(d) / static_cast<double>(D);
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p_graph.grid_size; ++j) {
      double dist = 0.0;
      for (std::size_t l = 0; l < p_graph.risks; ++l) {
        dist = std::max(dist, std::abs(p_graph(j, l) - beta));
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (!seen[best]) {
      seen[best] = 1;
      ordering.push_back(best);
    }
  }
  return ordering;
}

SplitFixedSequenceResult split_fixed_sequence(const PValueMatrix& p_graph,
                                              const PValueVector& p_test, std::size_t D,
                                              double delta) {
  if (p_graph.grid_size != p_test.size()) {
    throw InputError("both splits must share the same grid");
  }
  SplitFixedSequenceResult out;
  out.ordering = learn_split_ordering(p_graph, D);
  out.rejections = fixed_sequence_ordered(p_test, delta, out.ordering, {0});
  out.rejections.procedure = "split-fixed-sequence";
  return out;
}

std::string rejection_to_json(const RejectionSet& set) {
  json log = json::array();
  for (const auto& e : set.log) {
    json entry{{"index", e.index}, {"level", e.level}, {"p", e.p}, {"rejected", e.rejected}};
    if (!e.budget_updates.empty() || set.procedure == "sgt") {
      entry["remaining_budget"] = e.remaining_budget;
      json upd = json::array();
      for (const auto& [j, b] : e.budget_updates) upd.push_back({j, b});
      entry["budget_updates"] = std::move(upd);
    }
    log.push_back(std::move(entry));
  }
  json doc{{"procedure", set.procedure},
           {"delta", set.delta},
           {"rejected", set.indices},
           {"log", std::move(log)}};
  if (!set.alphas.empty()) doc["alphas"] = set.alphas;
  return doc.dump();
}

}  // namespace riskcal
