#include "subrh/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace subrh {

namespace {

int floor_div(int a, int n) { return a >= 0 ? a / n : -((-a + n - 1) / n); }
int mod(int a, int n) {
  const int r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

Grid::Grid(int n) : n_(n) {
  if (n < 8) throw std::invalid_argument("grid size must be at least 8, got " + std::to_string(n));
}

ScalarField::ScalarField(const Grid& grid, double value) : grid_(grid), data_(grid.size(), value) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> data)
    : grid_(grid), data_(std::move(data)) {
  if (data_.size() != grid_.size()) throw std::invalid_argument("scalar field data does not match grid");
}

double ScalarField::get_wrapped(int i, int j, int k) const {
  const int n = grid_.n();
  const int wraps = floor_div(j, n);
  const int jj = j - wraps * n;
  const int ii = mod(i, n);
  // each upward crossing of the y boundary shifts z by −i cells
  const long kk = static_cast<long>(k) - static_cast<long>(wraps) * ii;
  const int kw = static_cast<int>(((kk % n) + n) % n);
  return data_[grid_.index(ii, jj, kw)];
}

bool ScalarField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) { return axpy(1.0, o); }
ScalarField& ScalarField::operator-=(const ScalarField& o) { return axpy(-1.0, o); }

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& o) {
  if (!(grid_ == o.grid_)) throw std::invalid_argument("field grids differ");
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += s * o.data_[n];
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

MapField::MapField(const Grid& grid, int k) : grid_(grid) {
  if (k < 1) throw std::invalid_argument("map field needs at least one component");
  components_.assign(static_cast<std::size_t>(k), ScalarField(grid));
}

MapField::MapField(std::vector<ScalarField> components)
    : grid_(components.empty() ? throw std::invalid_argument("map field needs at least one component")
                               : components.front().grid()),
      components_(std::move(components)) {
  for (const auto& c : components_)
    if (!(c.grid() == grid_)) throw std::invalid_argument("map components must share one grid");
}

void MapField::point(std::size_t n, std::span<double> out) const {
  for (std::size_t a = 0; a < components_.size(); ++a) out[a] = components_[a][n];
}

void MapField::set_point(std::size_t n, std::span<const double> value) {
  for (std::size_t a = 0; a < components_.size(); ++a) components_[a][n] = value[a];
}

bool MapField::all_finite() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const ScalarField& c) { return c.all_finite(); });
}

MapField& MapField::axpy(double s, const MapField& o) {
  if (o.k() != k()) throw std::invalid_argument("map fields have different K");
  for (std::size_t a = 0; a < components_.size(); ++a) components_[a].axpy(s, o.components_[a]);
  return *this;
}

MapField operator-(const MapField& a, const MapField& b) {
  MapField r = a;
  r.axpy(-1.0, b);
  return r;
}

double sup_distance(const MapField& a, const MapField& b) {
  if (a.k() != b.k()) throw std::invalid_argument("map fields have different K");
  double m = 0.0;
  for (int c = 0; c < a.k(); ++c)
    for (std::size_t n = 0; n < a.points(); ++n) m = std::max(m, std::abs(a[c][n] - b[c][n]));
  return m;
}

}  // namespace subrh
