#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace subrh {

/// Uniform N×N×N grid on the fundamental domain [0,1)³.
class Grid {
 public:
  explicit Grid(int n);

  int n() const { return n_; }
  double h() const { return 1.0 / n_; }
  double cell_volume() const { return h() * h() * h(); }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }
  double x(int i) const { return i * h(); }
  double y(int j) const { return j * h(); }
  double z(int k) const { return k * h(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_;
};

/// Real values on the grid, k (the z index) fastest.
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double value = 0.0);
  ScalarField(const Grid& grid, std::vector<double> data);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }

  double& operator[](std::size_t n) { return data_[n]; }
  double operator[](std::size_t n) const { return data_[n]; }
  double& at(int i, int j, int k) { return data_[grid_.index(i, j, k)]; }
  double at(int i, int j, int k) const { return data_[grid_.index(i, j, k)]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Value at any integer index, realizing functions on the quotient:
  /// x and z wrap mod N, and crossing the y boundary upward shifts z by −i
  /// cells (f(x, y+1, z) = f(x, y, z − x)).
  double get_wrapped(int i, int j, int k) const;

  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  /// this += s * o
  ScalarField& axpy(double s, const ScalarField& o);

 private:
  Grid grid_;
  std::vector<double> data_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Map M → ℝ^K sampled on the grid, stored as K scalar components.
class MapField {
 public:
  MapField(const Grid& grid, int k);
  explicit MapField(std::vector<ScalarField> components);

  const Grid& grid() const { return grid_; }
  int k() const { return static_cast<int>(components_.size()); }
  std::size_t points() const { return grid_.size(); }

  ScalarField& operator[](int a) { return components_[static_cast<std::size_t>(a)]; }
  const ScalarField& operator[](int a) const { return components_[static_cast<std::size_t>(a)]; }

  /// Copy of the K values at grid point n.
  void point(std::size_t n, std::span<double> out) const;
  void set_point(std::size_t n, std::span<const double> value);

  bool all_finite() const;

  MapField& axpy(double s, const MapField& o);

 private:
  Grid grid_;
  std::vector<ScalarField> components_;
};

MapField operator-(const MapField& a, const MapField& b);

/// Largest |a − b| over all components and points.
double sup_distance(const MapField& a, const MapField& b);

}  // namespace subrh
