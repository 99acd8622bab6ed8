#include "subrh/crgeom.hpp"

#include <cmath>

#include "subrh/fields.hpp"
#include "subrh/initial_data.hpp"
#include "subrh/ops.hpp"

namespace subrh {

Frame Nil3Model::frame_at(const Point3& p) const {
  return Frame{{1.0, 0.0, p[1]}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
}

Point3 Nil3Model::contact_form(const Point3& p) const { return {-p[1], 0.0, 1.0}; }

double Nil3Model::theta(const Point3& p, const Point3& v) const {
  const Point3 c = contact_form(p);
  return c[0] * v[0] + c[1] * v[1] + c[2] * v[2];
}

double Nil3Model::dtheta(const Point3&, const Point3& v, const Point3& w) const {
  // d(dz − y dx) = dx ∧ dy
  return v[0] * w[1] - v[1] * w[0];
}

Point3 Nil3Model::complex_structure(const Point3& p, const Point3& horizontal) const {
  // Decompose in the frame: v = a X + b Y, then J v = a Y − b X.
  const Frame f = frame_at(p);
  const double a = horizontal[0];
  const double b = horizontal[1];
  return {a * f.Y[0] - b * f.X[0], a * f.Y[1] - b * f.X[1], a * f.Y[2] - b * f.X[2]};
}

double Nil3Model::levi_form(const Point3& p) const {
  const Frame f = frame_at(p);
  return dtheta(p, f.X, complex_structure(p, f.X));
}

double Nil3Model::volume_density(const Point3& p) const {
  // θ∧dθ = (dz − y dx)∧dx∧dy = dz∧dx∧dy = dx∧dy∧dz
  const Point3 c = contact_form(p);
  return c[2];
}

Point3 tau1(const Point3& p) { return {p[0] + 1.0, p[1], p[2]}; }
Point3 tau2(const Point3& p) { return {p[0], p[1] + 1.0, p[2] + p[0]}; }
Point3 tau3(const Point3& p) { return {p[0], p[1], p[2] + 1.0}; }
Point3 tau1_inverse(const Point3& p) { return {p[0] - 1.0, p[1], p[2]}; }
Point3 tau2_inverse(const Point3& p) { return {p[0], p[1] - 1.0, p[2] - p[0]}; }
Point3 tau3_inverse(const Point3& p) { return {p[0], p[1], p[2] - 1.0}; }

Point3 tau1_pushforward(const Point3& v) { return v; }
Point3 tau2_pushforward(const Point3& v) { return {v[0], v[1], v[2] + v[0]}; }
Point3 tau3_pushforward(const Point3& v) { return v; }

namespace {

double wrap_unit(double v) {
  double r = v - std::floor(v);
  // floor can round r up to exactly 1 for tiny negative inputs
  if (r >= 1.0) r = 0.0;
  return r;
}

}  // namespace

Point3 canonical_rep(const Point3& p) {
  // Reduce y with tau2^{-n}: (x, y, z) ↦ (x, y − n, z − n x); the z shift
  // uses the original x, then x is reduced with tau1 which leaves y, z fixed.
  const double ny = std::floor(p[1]);
  const double y = wrap_unit(p[1]);
  const double z = p[2] - ny * p[0];
  const double x = wrap_unit(p[0]);
  return {x, y, wrap_unit(z)};
}

StructureReport structure_check(int grid_n, std::uint64_t seed) {
  const Grid grid(grid_n);
  const ScalarField f = random_smooth_scalar(grid, seed, SmoothFieldOptions{.z_dependent = true});
  const ScalarField xy = apply_X(apply_Y(f));
  const ScalarField yx = apply_Y(apply_X(f));
  const ScalarField tf = apply_T(f);
  StructureReport r;
  double sum2 = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) {
    const double res = xy[n] - yx[n] + tf[n];
    r.residual_max = std::max(r.residual_max, std::abs(res));
    sum2 += res * res;
  }
  r.residual_l2 = std::sqrt(sum2 * grid.cell_volume());
  return r;
}

}  // namespace subrh
