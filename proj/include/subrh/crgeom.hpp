#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace subrh {

using Point3 = std::array<double, 3>;

/// Horizontal frame (X, Y) and Reeb field T as coordinate triples.
struct Frame {
  Point3 X;
  Point3 Y;
  Point3 T;
};

/// Polarized Heisenberg nilmanifold Nil³ = H₃(ℝ)/Γ.
///
/// Contact form θ = dz − y dx, horizontal frame X = ∂x + y∂z, Y = ∂y and
/// Reeb field T = ∂z, so that [X, Y] = −T and dθ(X, Y) = 1. The lattice Γ is
/// generated by the deck transformations below and the fundamental domain is
/// [0,1)³. Torsion and Webster Ricci curvature vanish identically.
class Nil3Model {
 public:
  std::string name() const { return "nil3"; }

  Frame frame_at(const Point3& p) const;

  /// Coefficients (θ_x, θ_y, θ_z) of θ at p.
  Point3 contact_form(const Point3& p) const;

  /// θ_p(v).
  double theta(const Point3& p, const Point3& v) const;

  /// dθ_p(v, w) = v_x w_y − v_y w_x.
  double dtheta(const Point3& p, const Point3& v, const Point3& w) const;

  /// Complex structure on the horizontal bundle: J X = Y, J Y = −X.
  Point3 complex_structure(const Point3& p, const Point3& horizontal) const;

  /// Levi form value dθ(X, J X).
  double levi_form(const Point3& p) const;

  double torsion() const { return 0.0; }
  double webster_ricci() const { return 0.0; }
  /// θ∧dθ relative to dx∧dy∧dz.
  double volume_density(const Point3& p) const;

  /// CR dimension m (dim M = 2m + 1).
  int cr_dimension() const { return 1; }
};

// Deck transformations generating Γ.
Point3 tau1(const Point3& p);
Point3 tau2(const Point3& p);
Point3 tau3(const Point3& p);
Point3 tau1_inverse(const Point3& p);
Point3 tau2_inverse(const Point3& p);
Point3 tau3_inverse(const Point3& p);

/// Unique Γ-orbit representative in [0,1)³. Idempotent.
Point3 canonical_rep(const Point3& p);

/// Push-forward of a tangent vector v at p under a deck transformation.
/// All three transformations are affine, so the differential is constant.
Point3 tau1_pushforward(const Point3& v);
Point3 tau2_pushforward(const Point3& v);
Point3 tau3_pushforward(const Point3& v);

struct StructureReport {
  double residual_max = 0.0;
  double residual_l2 = 0.0;
};

/// Evaluates ([X,Y] + T) f with the discrete frame derivatives on a seeded
/// random smooth Γ-invariant field f (z-dependent).
StructureReport structure_check(int grid_n, std::uint64_t seed);

}  // namespace subrh
