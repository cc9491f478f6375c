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

#include "riskcal/loss_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "riskcal/error.hpp"

namespace riskcal {

using nlohmann::json;

// ParameterGrid -------------------------------------------------------------

ParameterGrid::ParameterGrid(std::size_t dim, std::vector<double> coords,
                             std::optional<std::vector<std::size_t>> shape)
    : dim_(dim), coords_(std::move(coords)), shape_(std::move(shape)) {
  if (dim_ == 0) throw InputError("grid dimension must be at least 1");
  if (coords_.empty() || coords_.size() % dim_ != 0) {
    throw InputError("grid values must hold N >= 1 points of dimension " + std::to_string(dim_));
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw InputError("grid values must be finite");
  }
  if (!shape_) return;

  const auto& shp = *shape_;
  if (shp.size() != dim_) throw InputError("grid shape must have one entry per dimension");
  const std::size_t total =
      std::accumulate(shp.begin(), shp.end(), std::size_t{1}, std::multiplies<>());
  if (total != size()) throw InputError("product of grid shape does not match point count");

  // Strictly monotone along every axis, with one direction per axis.
  std::vector<std::size_t> stride(dim_, 1);
  for (std::size_t a = dim_ - 1; a > 0; --a) stride[a - 1] = stride[a] * shp[a];
  for (std::size_t a = 0; a < dim_; ++a) {
    int direction = 0;
    for (std::size_t j = 0; j < size(); ++j) {
      if ((j / stride[a]) % shp[a] == 0) continue;
      const double diff = coord(j, a) - coord(j - stride[a], a);
      const int sign = diff > 0 ? 1 : (diff < 0 ? -1 : 0);
      if (sign == 0 || (direction != 0 && sign != direction)) {
        throw InputError("grid values must be strictly monotone along axis " + std::to_string(a));
      }
      direction = sign;
    }
  }
}

ParameterGrid ParameterGrid::line(std::vector<double> values) {
  const std::size_t n = values.size();
  return ParameterGrid(1, std::move(values), std::vector<std::size_t>{n});
}

ParameterGrid ParameterGrid::product(const std::vector<std::vector<double>>& axes) {
  if (axes.empty()) throw InputError("product grid needs at least one axis");
  std::vector<std::size_t> shape;
  std::size_t total = 1;
  for (const auto& axis : axes) {
    if (axis.empty()) throw InputError("product grid axis is empty");
    shape.push_back(axis.size());
    total *= axis.size();
  }
  const std::size_t d = axes.size();
  std::vector<double> coords(total * d);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t j = 0; j < total; ++j) {
    for (std::size_t a = 0; a < d; ++a) coords[j * d + a] = axes[a][idx[a]];
    for (std::size_t a = d; a-- > 0;) {
      if (++idx[a] < shape[a]) break;
      idx[a] = 0;
    }
  }
  return ParameterGrid(d, std::move(coords), std::move(shape));
}

ParameterGrid ParameterGrid::uniform_unit(std::size_t n_points) {
  std::vector<double> v(n_points);
  for (std::size_t j = 0; j < n_points; ++j) {
    v[j] = static_cast<double>(j + 1) / static_cast<double>(n_points);
  }
  return line(std::move(v));
}

std::vector<std::size_t> ParameterGrid::unflatten(std::size_t j) const {
  if (!shape_) throw InputError("grid has no shape metadata");
  std::vector<std::size_t> idx(dim_);
  for (std::size_t a = dim_; a-- > 0;) {
    idx[a] = j % (*shape_)[a];
    j /= (*shape_)[a];
  }
  return idx;
}

std::size_t ParameterGrid::flatten(std::span<const std::size_t> idx) const {
  if (!shape_) throw InputError("grid has no shape metadata");
  std::size_t j = 0;
  for (std::size_t a = 0; a < dim_; ++a) j = j * (*shape_)[a] + idx[a];
  return j;
}

// LossTensor ----------------------------------------------------------------

LossTensor::LossTensor(std::size_t n, std::size_t n_grid, std::size_t n_risks,
                       std::vector<double> values, std::vector<bool> bounded_unit)
    : n_(n), n_grid_(n_grid), n_risks_(n_risks), values_(std::move(values)),
      bounded_(std::move(bounded_unit)) {
  if (n_ == 0 || n_grid_ == 0 || n_risks_ == 0) {
    throw InputError("loss tensor needs n >= 1, N >= 1 and m >= 1");
  }
  if (values_.size() != n_ * n_grid_ * n_risks_) {
    throw InputError("loss tensor value count does not match n * N * m");
  }
  if (bounded_.size() != n_risks_) throw InputError("one bounded flag is required per risk");
  validate();
}

LossTensor::LossTensor(std::size_t n, std::size_t n_grid, std::size_t n_risks, bool bounded_unit)
    : LossTensor(n, n_grid, n_risks, std::vector<double>(n * n_grid * n_risks, 0.0),
                 std::vector<bool>(n_risks, bounded_unit)) {}

bool LossTensor::all_bounded() const {
  return std::all_of(bounded_.begin(), bounded_.end(), [](bool b) { return b; });
}

void LossTensor::validate() const {
  for (std::size_t l = 0; l < n_risks_; ++l) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (double v : row(i, l)) {
        if (!std::isfinite(v)) throw InputError("loss entry is not finite");
        if (bounded_[l] && (v < 0.0 || v > 1.0)) {
          throw InputError("entry out of unit interval: " + format_double(v));
        }
      }
    }
  }
}

LossTensor LossTensor::slice_examples(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > n_) throw InputError("invalid example range");
  const std::size_t rows = end - begin;
  std::vector<double> out;
  out.reserve(rows * n_grid_ * n_risks_);
  for (std::size_t l = 0; l < n_risks_; ++l) {
    const auto first = values_.begin() + static_cast<std::ptrdiff_t>(index(begin, 0, l));
    out.insert(out.end(), first, first + static_cast<std::ptrdiff_t>(rows * n_grid_));
  }
  return LossTensor(rows, n_grid_, n_risks_, std::move(out), bounded_);
}

LossTensor LossTensor::risk_slice(std::size_t l) const {
  if (l >= n_risks_) throw InputError("risk index out of range");
  const auto first = values_.begin() + static_cast<std::ptrdiff_t>(index(0, 0, l));
  return LossTensor(n_, n_grid_, 1,
                    std::vector<double>(first, first + static_cast<std::ptrdiff_t>(n_ * n_grid_)),
                    {bounded_[l]});
}

LossTensor LossTensor::stack(const std::vector<LossTensor>& slices) {
  if (slices.empty()) throw InputError("nothing to stack");
  const std::size_t n = slices.front().n();
  const std::size_t grid = slices.front().grid_size();
  std::vector<double> values;
  std::vector<bool> bounded;
  for (const auto& s : slices) {
    if (s.n() != n || s.grid_size() != grid) throw InputError("stacked slices differ in shape");
    values.insert(values.end(), s.values_.begin(), s.values_.end());
    bounded.insert(bounded.end(), s.bounded_.begin(), s.bounded_.end());
  }
  const std::size_t m = bounded.size();
  return LossTensor(n, grid, m, std::move(values), std::move(bounded));
}

void RiskSpec::validate(std::size_t n_risks) const {
  if (alphas.size() != n_risks) {
    throw InputError("expected " + std::to_string(n_risks) + " alpha values, got " +
                     std::to_string(alphas.size()));
  }
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw InputError("alpha must lie in (0, 1)");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
}

RiskSummary empirical_risk(const LossTensor& loss) {
  const std::size_t n = loss.n(), grid = loss.grid_size(), m = loss.risks();
  RiskSummary out{grid, m, std::vector<double>(grid * m, 0.0), std::vector<double>(grid * m, 0.0)};
  std::vector<double> sum(grid), sq(grid);
  for (std::size_t l = 0; l < m; ++l) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = loss.row(i, l);
      for (std::size_t j = 0; j < grid; ++j) sum[j] += r[j];
    }
    for (std::size_t j = 0; j < grid; ++j) out.mean[j * m + l] = sum[j] / static_cast<double>(n);
    if (n < 2) continue;
    // Two-pass variance around the mean.
    std::fill(sq.begin(), sq.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = loss.row(i, l);
      for (std::size_t j = 0; j < grid; ++j) {
        const double d = r[j] - out.mean[j * m + l];
        sq[j] += d * d;
      }
    }
    for (std::size_t j = 0; j < grid; ++j) {
      out.stddev[j * m + l] = std::sqrt(sq[j] / static_cast<double>(n - 1));
    }
  }
  return out;
}

LossTensor pfdr_transform(const LossTensor& numerator, const LossTensor& nonempty, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (numerator.n() != nonempty.n() || numerator.grid_size() != nonempty.grid_size() ||
      numerator.risks() != 1 || nonempty.risks() != 1) {
    throw InputError("pfdr_transform: inputs must be single-risk matrices of equal shape");
  }
  LossTensor out(numerator.n(), numerator.grid_size(), 1, true);
  for (std::size_t i = 0; i < numerator.n(); ++i) {
    for (std::size_t j = 0; j < numerator.grid_size(); ++j) {
      const double r = nonempty(i, j);
      const double v = numerator(i, j);
      if (r != 0.0 && r != 1.0) throw InputError("non-empty indicator must be 0 or 1");
      if (v < 0.0 || v > r) {
        throw InputError("false-discovery proportion must lie in [0, r] (0/0 = 0 when r = 0)");
      }
      out.at(i, j) = std::clamp(v - alpha * r + alpha, 0.0, 1.0);
    }
  }
  return out;
}

// CSV -----------------------------------------------------------------------

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::size_t parse_header_field(const std::string& header, const std::string& key) {
  const std::string token = key + "=";
  auto pos = header.find(" " + token);
  if (pos == std::string::npos) throw InputError("malformed header: missing " + key);
  pos += token.size() + 1;
  std::size_t value = 0;
  const char* first = header.data() + pos;
  const char* last = header.data() + header.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || (res.ptr != last && *res.ptr != ' ' && *res.ptr != '\r')) {
    throw InputError("malformed header: bad value for " + key);
  }
  return value;
}

}  // namespace

void save_loss_csv(const LossTensor& loss, std::ostream& out) {
  out << "# n=" << loss.n() << " N=" << loss.grid_size() << " m=" << loss.risks()
      << " bounded=" << (loss.all_bounded() ? 1 : 0) << '\n';
  std::string line;
  for (std::size_t l = 0; l < loss.risks(); ++l) {
    for (std::size_t i = 0; i < loss.n(); ++i) {
      line.clear();
      const auto r = loss.row(i, l);
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (j) line += ',';
        line += format_double(r[j]);
      }
      line += '\n';
      out << line;
    }
  }
}

void save_loss_csv(const LossTensor& loss, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  save_loss_csv(loss, out);
}

LossTensor load_loss_csv(std::istream& in, const ParameterGrid* grid) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("#", 0) != 0) {
    throw InputError("malformed header: expected '# n=<n> N=<N> m=<m> bounded=<0|1>'");
  }
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const std::size_t n = parse_header_field(header, "n");
  const std::size_t n_grid = parse_header_field(header, "N");
  const std::size_t m = parse_header_field(header, "m");
  const std::size_t bounded = parse_header_field(header, "bounded");
  if (bounded > 1) throw InputError("malformed header: bounded must be 0 or 1");
  if (n == 0 || n_grid == 0 || m == 0) throw InputError("malformed header: zero dimension");
  if (grid && grid->size() != n_grid) {
    throw InputError("dimension mismatch: loss has N=" + std::to_string(n_grid) +
                     " but grid has " + std::to_string(grid->size()) + " points");
  }

  std::vector<double> values;
  values.reserve(n * n_grid * m);
  std::string line;
  for (std::size_t row = 0; row < n * m; ++row) {
    if (!std::getline(in, line)) {
      throw InputError("expected " + std::to_string(n * m) + " data rows, found " +
                       std::to_string(row));
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const char* p = line.data();
    const char* end = p + line.size();
    for (std::size_t j = 0; j < n_grid; ++j) {
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) {
        throw InputError("non-numeric cell at row " + std::to_string(row + 2) + ", column " +
                         std::to_string(j + 1));
      }
      values.push_back(v);
      p = res.ptr;
      if (j + 1 < n_grid) {
        if (p == end || *p != ',') {
          throw InputError("row " + std::to_string(row + 2) + " has fewer than N columns");
        }
        ++p;
      }
    }
    if (p != end) {
      throw InputError("row " + std::to_string(row + 2) + " has trailing content or extra columns");
    }
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line != "\r") throw InputError("more data rows than the header declares");
  }
  return LossTensor(n, n_grid, m, std::move(values), std::vector<bool>(m, bounded == 1));
}

LossTensor load_loss_csv(const std::filesystem::path& path, const ParameterGrid* grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return load_loss_csv(in, grid);
}

// Grid JSON -----------------------------------------------------------------

std::string grid_to_json(const ParameterGrid& grid) {
  json values = json::array();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto pt = grid.point(j);
    values.push_back(json(std::vector<double>(pt.begin(), pt.end())));
  }
  json doc;
  doc["dim"] = grid.dim();
  doc["shape"] = grid.shape() ? json(*grid.shape()) : json(nullptr);
  doc["values"] = std::move(values);
  return doc.dump();
}

ParameterGrid grid_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("grid JSON: ") + e.what());
  }
  try {
    const auto dim = doc.at("dim").get<std::size_t>();
    std::optional<std::vector<std::size_t>> shape;
    if (doc.contains("shape") && !doc["shape"].is_null()) {
      shape = doc["shape"].get<std::vector<std::size_t>>();
    }
    std::vector<double> coords;
    for (const auto& pt : doc.at("values")) {
      const auto v = pt.is_array() ? pt.get<std::vector<double>>() : std::vector<double>{pt.get<double>()};
      if (v.size() != dim) throw InputError("grid point has wrong dimension");
      coords.insert(coords.end(), v.begin(), v.end());
    }
    return ParameterGrid(dim, std::move(coords), std::move(shape));
  } catch (const json::exception& e) {
    throw InputError(std::string("grid JSON: ") + e.what());
  }
}

ParameterGrid load_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return grid_from_json(buf.str());
}

void save_grid(const ParameterGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << grid_to_json(grid) << '\n';
}

}  // namespace riskcal
