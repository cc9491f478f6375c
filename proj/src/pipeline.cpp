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

#include "riskcal/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "riskcal/error.hpp"

namespace riskcal {

std::string_view to_string(Procedure p) {
  switch (p) {
    case Procedure::kBonferroni: return "bonferroni";
    case Procedure::kHolm: return "holm";
    case Procedure::kFixedSequence: return "fixed-seq";
    case Procedure::kSgt: return "sgt";
    case Procedure::kSplitFixedSequence: return "split-fixed-seq";
    case Procedure::kCascade2d: return "cascade-2d";
    case Procedure::kUniform: return "uniform";
  }
  return "unknown";
}

Procedure parse_procedure(std::string_view name) {
  for (auto p : {Procedure::kBonferroni, Procedure::kHolm, Procedure::kFixedSequence,
                 Procedure::kSgt, Procedure::kSplitFixedSequence, Procedure::kCascade2d,
                 Procedure::kUniform}) {
    if (to_string(p) == name) return p;
  }
  throw InputError("unknown procedure: " + std::string(name));
}

namespace {

RejectionSet uniform_rejections(const UniformCalibration& cal, const RiskSummary& summary,
                                double alpha, double delta) {
  RejectionSet out;
  out.procedure = "uniform";
  out.delta = delta;
  for (std::size_t j : cal.certified) {
    const double ucb = upper_confidence_bound(summary.r_hat(j), cal.eta->t, cal.eta->eta);
    out.log.push_back({j, alpha, ucb, true, 0.0, {}});
    out.indices.push_back(j);
  }
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

}  // namespace

CalibrationOutcome run_procedure(const ProcedureSpec& spec, const LossTensor& loss,
                                 const ParameterGrid& grid, const RiskSpec& risk) {
  risk.validate(loss.risks());
  if (loss.grid_size() != grid.size()) {
    throw InputError("loss has N=" + std::to_string(loss.grid_size()) + " but grid has " +
                     std::to_string(grid.size()) + " points");
  }
  CalibrationOutcome out;

  switch (spec.kind) {
    case Procedure::kBonferroni:
    case Procedure::kHolm:
    case Procedure::kFixedSequence:
    case Procedure::kSgt:
    case Procedure::kCascade2d: {
      out.pvalues = pvalues(loss, risk, spec.pvalue, spec.clt_scaling);
      if (spec.kind == Procedure::kBonferroni) {
        out.rejections = bonferroni(out.pvalues, risk.delta);
      } else if (spec.kind == Procedure::kHolm) {
        out.rejections = holm(out.pvalues, risk.delta);
      } else if (spec.kind == Procedure::kFixedSequence) {
        const std::vector<std::size_t> starts =
            spec.starts.empty() ? std::vector<std::size_t>{0} : spec.starts;
        out.rejections = fixed_sequence(out.pvalues, risk.delta, starts);
      } else if (spec.kind == Procedure::kSgt) {
        if (!spec.graph) throw InputError("sgt needs a test graph");
        if (spec.graph->size() != grid.size()) {
          throw InputError("test graph size does not match the grid");
        }
        if (std::abs(spec.graph->delta() - risk.delta) > 1e-12) {
          throw InputError("test graph budgets must sum to delta");
        }
        out.rejections = sgt(out.pvalues, *spec.graph);
        out.rejections.delta = risk.delta;
      } else {
        if (!grid.shape() || grid.shape()->size() != 2) {
          throw InputError("cascade-2d needs a 2-D grid with shape metadata");
        }
        out.rejections = cascaded_2d_fixed_sequence(out.pvalues, (*grid.shape())[0],
                                                    (*grid.shape())[1], risk.delta);
      }
      break;
    }
    case Procedure::kSplitFixedSequence: {
      if (!(spec.split_fraction > 0.0 && spec.split_fraction < 1.0)) {
        throw InputError("split fraction must lie in (0, 1)");
      }
      const auto n_graph = static_cast<std::size_t>(
          std::floor(static_cast<double>(loss.n()) * spec.split_fraction));
      if (n_graph == 0 || n_graph >= loss.n()) {
        throw InputError("split leaves an empty graph or testing set");
      }
      const LossTensor graph_part = loss.slice_examples(0, n_graph);
      const LossTensor test_part = loss.slice_examples(n_graph, loss.n());
      const PValueMatrix p_graph =
          pvalues_from_tensor(graph_part, risk, spec.pvalue, spec.clt_scaling);
      out.pvalues = pvalues(test_part, risk, spec.pvalue, spec.clt_scaling);
      auto split = split_fixed_sequence(p_graph, out.pvalues, spec.split_levels, risk.delta);
      out.ordering = std::move(split.ordering);
      out.rejections = std::move(split.rejections);
      break;
    }
    case Procedure::kUniform: {
      if (loss.risks() != 1) throw InputError("uniform baseline controls a single risk");
      const double alpha = risk.alphas.front();
      UniformCalibration cal;
      if (spec.cached_eta) {
        cal = calibrate_uniform(loss, grid, alpha, *spec.cached_eta);
      } else if (spec.eta) {
        EtaChoice choice{*spec.eta, 0.0, 0.0};
        try {
          choice.t = solve_t(*spec.eta, risk.delta, loss.n(), spec.uniform);
          choice.x = alpha - choice.t * std::sqrt(alpha + choice.eta);
          cal = calibrate_uniform(loss, grid, alpha, choice);
        } catch (const InputError&) {
          if (grid.dim() != 1) throw;
        }
      } else {
        cal = calibrate_uniform(loss, grid, alpha, risk.delta, spec.uniform);
      }
      out.eta = cal.eta;
      if (cal.eta) {
        out.rejections = uniform_rejections(cal, empirical_risk(loss), alpha, risk.delta);
      } else {
        out.rejections.procedure = "uniform";
        out.rejections.delta = risk.delta;
      }
      break;
    }
  }
  out.rejections.alphas = risk.alphas;
  if (spec.kind == Procedure::kFixedSequence) out.rejections.procedure = "fixed-seq";
  if (spec.kind == Procedure::kSplitFixedSequence) out.rejections.procedure = "split-fixed-seq";
  return out;
}

}  // namespace riskcal
