#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace subrh {

/// Nil³ lattice with N points along x and y and N² along z.
///
/// With z-cells of size h² the horizontal moves are exact lattice maps:
///   X: (i, j, k) → (i ± 1, j, k ± j)          (z advances by y·h = j·h²)
///   Y: (i, j, k) → (i, j ± 1, k)
/// and the y-boundary twist (x, y+1, z) ~ (x, y, z − x) becomes
/// (i, j + N, k) ~ (i, j, k − i·N). Cells have volume h⁴, matching the
/// homogeneous dimension 4 of the CC geometry.
class HorizontalLattice {
 public:
  explicit HorizontalLattice(int n);

  int n() const { return n_; }
  long nz() const { return nz_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * nz_; }
  double h() const { return 1.0 / n_; }
  double cell_volume() const { return h() * h() * h() * h(); }

  std::size_t index(int i, int j, long k) const;
  /// Lattice node of the N³ grid point (i, j, k).
  std::size_t from_grid(int i, int j, int k) const { return index(i, j, static_cast<long>(k) * n_); }

  /// Neighbors along +X, −X, +Y, −Y.
  std::array<std::size_t, 4> neighbors(std::size_t idx) const;

  /// Breadth-first step counts from `source` (all edges have length h);
  /// nodes farther than `max_steps` keep kUnreached.
  static constexpr std::uint16_t kUnreached = 0xffff;
  std::vector<std::uint16_t> step_distances(std::size_t source, int max_steps = 0xfffe) const;

  /// Lazy random-walk sub-Laplacian step with dt = h²/8:
  /// out = u + (dt/h²)(Σ_neighbors u − 4u). Mass-preserving and
  /// positivity-preserving.
  void heat_step(std::span<const double> in, std::span<double> out) const;
  double heat_dt() const { return h() * h() / 8.0; }

 private:
  int n_;
  long nz_;
};

struct GridPoint {
  int i = 0, j = 0, k = 0;
};

/// CC distance between N³ grid points (shortest horizontal lattice path).
double cc_distance(int grid_n, GridPoint p, GridPoint q);

/// h⁴ · #{lattice nodes within CC distance δ of p}.
double cc_ball_volume(int grid_n, GridPoint p, double delta);

struct BallScaling {
  std::vector<double> radii;
  std::vector<double> volumes;
  double exponent = 0.0;
};

/// Ball volumes for every lattice radius in [delta_lo, delta_hi] and the
/// fitted log-log exponent.
BallScaling cc_ball_scaling(int grid_n, double delta_lo, double delta_hi, GridPoint center = {});

}  // namespace subrh
