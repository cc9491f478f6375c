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

#include "riskcal/selection.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace riskcal {

SelectionStage SelectionStage::extremum(std::size_t axis, bool maximize) {
  SelectionStage s;
  s.kind = Kind::kExtremum;
  s.axis = axis;
  s.maximize = maximize;
  return s;
}

SelectionStage SelectionStage::objective(std::size_t risk, bool maximize) {
  SelectionStage s;
  s.kind = Kind::kObjective;
  s.risk = risk;
  s.maximize = maximize;
  return s;
}

SelectionStage SelectionStage::filter(std::vector<double> coefficients, double offset,
                                      bool strict) {
  SelectionStage s;
  s.kind = Kind::kFilter;
  s.coefficients = std::move(coefficients);
  s.offset = offset;
  s.strict = strict;
  return s;
}

namespace {

void keep_extreme(std::vector<std::size_t>& cand, bool maximize, auto&& value) {
  double best = value(cand.front());
  for (std::size_t j : cand) {
    const double v = value(j);
    if (maximize ? v > best : v < best) best = v;
  }
  std::erase_if(cand, [&](std::size_t j) { return value(j) != best; });
}

}  // namespace

std::optional<std::size_t> select_lexicographic(const RejectionSet& rejections,
                                                const ParameterGrid& grid,
                                                const std::vector<SelectionStage>& stages,
                                                const RiskSummary* summary) {
  std::vector<std::size_t> cand = rejections.indices;
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  for (std::size_t j : cand) {
    if (j >= grid.size()) throw InputError("certified index outside the grid");
  }
  if (cand.empty()) return std::nullopt;

  for (const auto& st : stages) {
    switch (st.kind) {
      case SelectionStage::Kind::kFilter: {
        if (st.coefficients.size() != grid.dim()) {
          throw InputError("filter needs one coefficient per grid axis");
        }
        std::erase_if(cand, [&](std::size_t j) {
          double v = st.offset;
          for (std::size_t k = 0; k < grid.dim(); ++k) v += st.coefficients[k] * grid.coord(j, k);
          return st.strict ? !(v < 0.0) : !(v <= 0.0);
        });
        break;
      }
      case SelectionStage::Kind::kExtremum:
        if (st.axis >= grid.dim()) throw InputError("selection axis outside the grid dimension");
        keep_extreme(cand, st.maximize, [&](std::size_t j) { return grid.coord(j, st.axis); });
        break;
      case SelectionStage::Kind::kObjective:
        if (summary == nullptr) throw InputError("objective stage needs empirical risks");
        if (st.risk >= summary->risks) throw InputError("objective risk index out of range");
        if (summary->grid_size != grid.size()) throw InputError("risk summary and grid differ");
        keep_extreme(cand, st.maximize, [&](std::size_t j) { return summary->r_hat(j, st.risk); });
        break;
    }
    if (cand.empty()) throw UnsatisfiableSelection();
  }
  return cand.front();
}

std::optional<std::size_t> select_sup(const RejectionSet& rejections, const ParameterGrid& grid,
                                      std::size_t axis) {
  return select_lexicographic(rejections, grid, {SelectionStage::extremum(axis, true)});
}

SelectionRule sup_rule() { return {"sup", {SelectionStage::extremum(0, true)}}; }

SelectionRule detection_rule(std::size_t objective_risk) {
  return {"detection",
          {SelectionStage::filter({-1.0, 0.0, -1.0}, 1.0, true),
           SelectionStage::extremum(2, false), SelectionStage::extremum(0, true),
           SelectionStage::objective(objective_risk, false), SelectionStage::extremum(1, true)}};
}

SelectionRule selection_rule_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("selection rule is not valid JSON: ") + e.what());
  }
  SelectionRule rule;
  try {
    rule.name = j.value("name", std::string("custom"));
    if (!j.contains("stages") || !j["stages"].is_array()) {
      throw InputError("selection rule needs a \"stages\" array");
    }
    for (const auto& s : j["stages"]) {
      const std::string type = s.at("type").get<std::string>();
      auto direction = [&] {
        const std::string d = s.value("direction", std::string("max"));
        if (d != "max" && d != "min") throw InputError("direction must be min or max");
        return d == "max";
      };
      if (type == "extremum") {
        rule.stages.push_back(SelectionStage::extremum(s.at("axis").get<std::size_t>(), direction()));
      } else if (type == "objective") {
        rule.stages.push_back(SelectionStage::objective(s.value("risk", std::size_t{0}),
                                                        s.contains("direction") && direction()));
      } else if (type == "filter") {
        rule.stages.push_back(SelectionStage::filter(s.at("coefficients").get<std::vector<double>>(),
                                                     s.value("offset", 0.0), s.value("strict", true)));
      } else {
        throw InputError("unknown selection stage type: " + type);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed selection rule: ") + e.what());
  }
  return rule;
}

std::string selection_rule_to_json(const SelectionRule& rule) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : rule.stages) {
    nlohmann::json o;
    switch (s.kind) {
      case SelectionStage::Kind::kFilter:
        o = {{"type", "filter"}, {"coefficients", s.coefficients}, {"offset", s.offset},
             {"strict", s.strict}};
        break;
      case SelectionStage::Kind::kExtremum:
        o = {{"type", "extremum"}, {"axis", s.axis}, {"direction", s.maximize ? "max" : "min"}};
        break;
      case SelectionStage::Kind::kObjective:
        o = {{"type", "objective"}, {"risk", s.risk}, {"direction", s.maximize ? "max" : "min"}};
        break;
    }
    stages.push_back(o);
  }
  return nlohmann::json{{"name", rule.name}, {"stages", stages}}.dump(2);
}

SelectionRule load_selection_rule(const std::string& name_or_path) {
  if (name_or_path == "sup") return sup_rule();
  if (name_or_path == "detection") return detection_rule();
  std::ifstream in(name_or_path);
  if (!in) throw InputError("unknown selection preset or unreadable file: " + name_or_path);
  std::stringstream buf;
  buf << in.rdbuf();
  return selection_rule_from_json(buf.str());
}

}  // namespace riskcal
