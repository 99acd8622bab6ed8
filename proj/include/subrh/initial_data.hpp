#pragma once

#include <array>
#include <cstdint>

#include "subrh/fields.hpp"
#include "subrh/targets.hpp"

namespace subrh {

struct SmoothFieldOptions {
  int max_mode = 3;
  bool z_dependent = false;
  /// Bound on |f|; the normalization is analytic, so the same seed gives the
  /// same continuous function at every N.
  double amplitude = 1.0;
};

/// Seeded random low-frequency Γ-invariant field: trigonometric modes in
/// (x, y) up to `max_mode`, plus (when z-dependent) theta-type modes
/// Re γ Σ_m e^{2πi(z + m x)} ψ(y + m) with a Gaussian-weighted ψ.
ScalarField random_smooth_scalar(const Grid& grid, std::uint64_t seed, const SmoothFieldOptions& opts = {});

/// Θ(x, y, z) = Σ_m e^{2πi(z + m x)} e^{−π (y + m)²}. Re Θ is an exact
/// eigenfunction of the sub-Laplacian with eigenvalue −2π and
/// T Re Θ = −2π Im Θ.
double theta_ground_state(double x, double y, double z);
double theta_ground_state_imag(double x, double y, double z);
ScalarField sample(const Grid& grid, double (*fn)(double, double, double));

struct InitialDataOptions {
  double amplitude = 0.3;
  bool z_dependent = false;
  /// Clifford torus winding matrix, row = target angle, column = (x, y) cycle.
  std::array<int, 4> winding{1, 0, 0, 1};
  /// Relative radial offset applied to embedded data after projection
  /// (0 keeps the data on N).
  double radial_offset = 0.0;
  int max_mode = 3;
};

/// Seeded smooth initial map into the target, sampled on the grid.
MapField initial_map(const Target& target, const Grid& grid, std::uint64_t seed, const InitialDataOptions& opts = {});

/// Nil³ → Clifford torus, angles (2πx + shift1, 2πy + shift2).
MapField standard_torus_map(const Grid& grid, double shift1 = 0.0, double shift2 = 0.0);

/// Constant map with the given value.
MapField constant_map(const Grid& grid, std::span<const double> value);

}  // namespace subrh
