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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskcal/fwer.hpp"
#include "riskcal/loss_data.hpp"
#include "riskcal/pvalues.hpp"
#include "riskcal/uniform_bounds.hpp"

namespace riskcal {

enum class Procedure {
  kBonferroni,
  kHolm,
  kFixedSequence,
  kSgt,
  kSplitFixedSequence,
  kCascade2d,
  kUniform,
};

std::string_view to_string(Procedure p);
Procedure parse_procedure(std::string_view name);

/// Everything needed to turn a loss tensor into a certified set.
struct ProcedureSpec {
  Procedure kind = Procedure::kBonferroni;
  PValueMethod pvalue = PValueMethod::kHoeffdingBentkus;
  CltScaling clt_scaling = CltScaling::kStandardError;
  /// Fixed sequence: start indices on the identity ordering (defaults to {0}).
  std::vector<std::size_t> starts;
  /// SGT: the graph; its budgets define delta.
  std::optional<TestGraph> graph;
  /// Split fixed sequence: fraction of examples used to learn the ordering, and D.
  double split_fraction = 0.5;
  std::size_t split_levels = 100;
  /// Uniform baseline: bound configuration and an optional fixed eta.
  UniformBoundConfig uniform;
  std::optional<double> eta;
  std::optional<EtaChoice> cached_eta;
};

struct CalibrationOutcome {
  RejectionSet rejections;
  PValueVector pvalues;                // p-values the final test used
  std::vector<std::size_t> ordering;   // learned ordering (split fixed sequence only)
  std::optional<EtaChoice> eta;        // uniform baseline only
};

/// Computes p-values and runs the requested FWER procedure.
CalibrationOutcome run_procedure(const ProcedureSpec& spec, const LossTensor& loss,
                                 const ParameterGrid& grid, const RiskSpec& risk);

}  // namespace riskcal
