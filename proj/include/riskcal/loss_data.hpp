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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace riskcal {

/// Discrete set of tuning parameters. Each point is a d-dimensional vector;
/// when `shape` is present the points form a row-major tensor-product grid.
class ParameterGrid {
 public:
  ParameterGrid(std::size_t dim, std::vector<double> coords,
                std::optional<std::vector<std::size_t>> shape = std::nullopt);

  /// 1-D grid over the given values.
  static ParameterGrid line(std::vector<double> values);
  /// Tensor-product grid over per-axis values, flattened row-major.
  static ParameterGrid product(const std::vector<std::vector<double>>& axes);
  /// {1/N, 2/N, ..., 1}.
  static ParameterGrid uniform_unit(std::size_t n_points);

  std::size_t size() const { return coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  const std::optional<std::vector<std::size_t>>& shape() const { return shape_; }

  std::span<const double> point(std::size_t j) const {
    return {coords_.data() + j * dim_, dim_};
  }
  double coord(std::size_t j, std::size_t axis) const { return coords_[j * dim_ + axis]; }

  /// Multi-index of flat index j; requires shape.
  std::vector<std::size_t> unflatten(std::size_t j) const;
  std::size_t flatten(std::span<const std::size_t> idx) const;

  bool operator==(const ParameterGrid&) const = default;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  std::optional<std::vector<std::size_t>> shape_;
};

/// Losses L[i][j][l] for n examples, N grid points and m risks.
class LossTensor {
 public:
  LossTensor(std::size_t n, std::size_t n_grid, std::size_t n_risks, std::vector<double> values,
             std::vector<bool> bounded_unit);
  /// Zero-filled tensor; entries are filled through `at`.
  LossTensor(std::size_t n, std::size_t n_grid, std::size_t n_risks, bool bounded_unit);

  std::size_t n() const { return n_; }
  std::size_t grid_size() const { return n_grid_; }
  std::size_t risks() const { return n_risks_; }
  bool bounded(std::size_t l) const { return bounded_[l]; }
  bool all_bounded() const;

  double operator()(std::size_t i, std::size_t j, std::size_t l = 0) const {
    return values_[index(i, j, l)];
  }
  double& at(std::size_t i, std::size_t j, std::size_t l = 0) { return values_[index(i, j, l)]; }

  /// Row of risk l for example i (length N).
  std::span<const double> row(std::size_t i, std::size_t l = 0) const {
    return {values_.data() + index(i, 0, l), n_grid_};
  }

  /// Examples [begin, end) as a new tensor.
  LossTensor slice_examples(std::size_t begin, std::size_t end) const;
  /// Single-risk tensor holding slice l.
  LossTensor risk_slice(std::size_t l) const;
  /// Stack single-risk tensors with matching (n, N) into one multi-risk tensor.
  static LossTensor stack(const std::vector<LossTensor>& slices);

  /// Throws InputError if a bounded slice has an entry outside [0, 1].
  void validate() const;

  bool operator==(const LossTensor&) const = default;

 private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t l) const {
    return (l * n_ + i) * n_grid_ + j;
  }

  std::size_t n_;
  std::size_t n_grid_;
  std::size_t n_risks_;
  std::vector<double> values_;  // risk-major, then example, then grid point
  std::vector<bool> bounded_;
};

/// Target levels alpha_l for each risk and the tolerance delta.
struct RiskSpec {
  std::vector<double> alphas;
  double delta;

  void validate(std::size_t n_risks) const;
};

/// Per-cell empirical mean and sample standard deviation, indexed [j][l] flat as j * m + l.
struct RiskSummary {
  std::size_t grid_size;
  std::size_t risks;
  std::vector<double> mean;
  std::vector<double> stddev;

  double r_hat(std::size_t j, std::size_t l = 0) const { return mean[j * risks + l]; }
  double sigma_hat(std::size_t j, std::size_t l = 0) const { return stddev[j * risks + l]; }
};

RiskSummary empirical_risk(const LossTensor& loss);

/// Rewrites a positive-FDR target as an unconditional bounded loss
/// L' = v - alpha * r + alpha, where r flags a non-empty prediction and v is the
/// false-discovery proportion (0 whenever r is 0). mean(L') <= alpha iff pFDR <= alpha.
LossTensor pfdr_transform(const LossTensor& numerator, const LossTensor& nonempty, double alpha);

// Files ---------------------------------------------------------------------

/// Loss CSV: a `# n=<n> N=<N> m=<m> bounded=<0|1>` header, then n*m rows of N
/// comma-separated values, all rows of risk 1 first. Values are written in the
/// shortest form that reads back to the identical double.
void save_loss_csv(const LossTensor& loss, std::ostream& out);
void save_loss_csv(const LossTensor& loss, const std::filesystem::path& path);
LossTensor load_loss_csv(std::istream& in, const ParameterGrid* grid = nullptr);
LossTensor load_loss_csv(const std::filesystem::path& path, const ParameterGrid* grid = nullptr);

/// Grid JSON: {"dim": d, "shape": [..] | null, "values": [[..], ...]}.
std::string grid_to_json(const ParameterGrid& grid);
ParameterGrid grid_from_json(const std::string& text);
ParameterGrid load_grid(const std::filesystem::path& path);
void save_grid(const ParameterGrid& grid, const std::filesystem::path& path);

/// Shortest round-trip decimal for a double.
std::string format_double(double v);

}  // namespace riskcal
