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
#include <string>
#include <utility>
#include <vector>

#include "riskcal/pvalues.hpp"

namespace riskcal {

/// One test decision. For graphical testing, rejections also carry the budgets
/// that changed and the total budget left on unrejected nodes afterwards.
struct AuditEvent {
  std::size_t index = 0;
  double level = 0.0;
  double p = 1.0;
  bool rejected = false;
  double remaining_budget = 0.0;
  std::vector<std::pair<std::size_t, double>> budget_updates;

  bool operator==(const AuditEvent&) const = default;
};

/// Certified subset of the grid plus provenance.
struct RejectionSet {
  std::vector<std::size_t> indices;  // sorted, unique
  std::string procedure;
  std::vector<double> alphas;
  double delta = 0.0;
  std::vector<AuditEvent> log;

  bool empty() const { return indices.empty(); }
  bool contains(std::size_t j) const;
};

/// Rebuilds the rejected index set from the audit log alone.
std::vector<std::size_t> replay(const RejectionSet& set);

struct Edge {
  std::size_t from;
  std::size_t to;
  double weight;
};

/// Directed graph for sequential graphical testing: node budgets summing to delta
/// and transition weights with zero diagonal and out-weights summing to at most 1.
class TestGraph {
 public:
  TestGraph(std::vector<double> budgets, std::vector<Edge> edges);

  std::size_t size() const { return budgets_.size(); }
  double delta() const;
  const std::vector<double>& budgets() const { return budgets_; }
  /// Outgoing (target, weight) pairs of node i, sorted by target.
  const std::vector<std::pair<std::size_t, double>>& out(std::size_t i) const { return out_[i]; }
  double weight(std::size_t from, std::size_t to) const;
  std::vector<Edge> edges() const;

 private:
  std::vector<double> budgets_;
  std::vector<std::vector<std::pair<std::size_t, double>>> out_;
};

std::string graph_to_json(const TestGraph& g);
TestGraph graph_from_json(const std::string& text);

// Procedures ----------------------------------------------------------------

/// {j : p_j <= delta / N}.
RejectionSet bonferroni(const PValueVector& p, double delta);

/// Holm step-down.
RejectionSet holm(const PValueVector& p, double delta);

/// Fixed sequence testing along the identity ordering: from each start, walk
/// j, j+1, ... while p_j <= delta / |starts|.
RejectionSet fixed_sequence(const PValueVector& p, double delta,
                            const std::vector<std::size_t>& starts);

/// Fixed sequence testing along an explicit ordering of grid indices. `start_positions`
/// index into `ordering`.
RejectionSet fixed_sequence_ordered(const PValueVector& p, double delta,
                                    const std::vector<std::size_t>& ordering,
                                    const std::vector<std::size_t>& start_positions);

/// Sequential graphical testing. Among eligible nodes the lowest index is rejected first.
RejectionSet sgt(const PValueVector& p, const TestGraph& graph);

/// Fallback graph on a K x M grid (row-major, rows index the first coordinate).
/// Each row is a chain from the largest second-coordinate index downward, with
/// budget delta / K at the chain head; the tail of row k feeds the head of row k+1.
TestGraph build_fallback_graph(std::size_t rows, std::size_t cols, double delta);

/// Hamming graph on an N x N grid. Node (i, j), 1-based and counted from the
/// corner with the largest indices on both axes, maps to flat index
/// (N - i) * N + (N - j). All budget starts at (1, 1).
TestGraph build_hamming_graph(std::size_t side, double delta);

/// Flat index of Hamming node (i, j) (1-based) on an N x N grid.
inline std::size_t hamming_node(std::size_t side, std::size_t i, std::size_t j) {
  return (side - i) * side + (side - j);
}

/// Two-phase fixed sequence on a K x M grid: delta / 2 walks the first axis
/// downward along the column with the largest second coordinate; the last
/// rejected row then gets a delta / 2 walk down the second axis.
RejectionSet cascaded_2d_fixed_sequence(const PValueVector& p, std::size_t rows,
                                        std::size_t cols, double delta);

struct SplitFixedSequenceResult {
  std::vector<std::size_t> ordering;
  RejectionSet rejections;
};

/// Learns a path from p-values on one split (points whose per-risk p-values are all
/// closest to beta = d / D, d = 0..D, duplicates dropped), then runs fixed sequence
/// with a single start along that path using the p-values from the other split.
SplitFixedSequenceResult split_fixed_sequence(const PValueMatrix& p_graph,
                                              const PValueVector& p_test, std::size_t D,
                                              double delta);

/// Ordering learned by split_fixed_sequence.
std::vector<std::size_t> learn_split_ordering(const PValueMatrix& p_graph, std::size_t D);

std::string rejection_to_json(const RejectionSet& set);

}  // namespace riskcal
