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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "riskcal/error.hpp"
#include "riskcal/fwer.hpp"
#include "riskcal/loss_data.hpp"

namespace riskcal {

class UnsatisfiableSelection : public InputError {
 public:
  UnsatisfiableSelection() : InputError("selection constraints unsatisfiable within the certified set") {}
};

/// One stage of a lexicographic rule.
///
/// kFilter keeps points with  offset + sum_k coefficients[k] * lambda_k  < 0  (or <= 0 when
/// not strict). kExtremum keeps the points attaining the min or max of one coordinate.
/// kObjective keeps the points attaining the min or max of an empirical risk column.
struct SelectionStage {
  enum class Kind { kFilter, kExtremum, kObjective };

  Kind kind = Kind::kExtremum;
  std::size_t axis = 0;
  bool maximize = true;
  std::vector<double> coefficients;
  double offset = 0.0;
  bool strict = true;
  std::size_t risk = 0;

  static SelectionStage extremum(std::size_t axis, bool maximize);
  static SelectionStage objective(std::size_t risk, bool maximize = false);
  static SelectionStage filter(std::vector<double> coefficients, double offset, bool strict = true);
};

struct SelectionRule {
  std::string name;
  std::vector<SelectionStage> stages;
};

/// The point of the certified set with the largest coordinate on `axis`; none when the set
/// is empty (abstention).
std::optional<std::size_t> select_sup(const RejectionSet& rejections, const ParameterGrid& grid,
                                      std::size_t axis = 0);

/// Applies the stages in order. `summary` is required by objective stages. Returns none
/// when the certified set is empty; throws UnsatisfiableSelection when a stage leaves no
/// candidate. Remaining ties go to the smallest flat index.
std::optional<std::size_t> select_lexicographic(const RejectionSet& rejections,
                                                const ParameterGrid& grid,
                                                const std::vector<SelectionStage>& stages,
                                                const RiskSummary* summary = nullptr);

/// "sup": largest lambda on axis 0.
SelectionRule sup_rule();
/// Three-stage detection rule on (lambda_1, lambda_2, lambda_3): keep points with
/// 1 - lambda_1 < lambda_3, take the smallest lambda_3, then the largest lambda_1, then the
/// points minimizing the empirical risk of `objective_risk`, then the largest lambda_2.
SelectionRule detection_rule(std::size_t objective_risk = 1);

/// Resolves a preset name ("sup", "detection") or a JSON file describing the stages.
SelectionRule load_selection_rule(const std::string& name_or_path);
SelectionRule selection_rule_from_json(const std::string& text);
std::string selection_rule_to_json(const SelectionRule& rule);

}  // namespace riskcal
