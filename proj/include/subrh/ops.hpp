#pragma once

#include <span>
#include <stdexcept>
#include <utility>

#include "subrh/fields.hpp"

namespace subrh {

class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Centered second-order frame derivatives with twisted-periodic access.
/// (Xf) = D_x f + y D_z f, (Yf) = D_y f, (Tf) = D_z f.
ScalarField apply_X(const ScalarField& f);
ScalarField apply_Y(const ScalarField& f);
ScalarField apply_T(const ScalarField& f);

/// Direct stencil for Δ_H f = f_xx + f_yy + 2y f_xz + y² f_zz.
ScalarField sub_laplacian(const ScalarField& f);

/// Pointwise density of −½⟨f, Δ_H f⟩:
///   ½((D⁺ₓf)² + (D⁺ᵧf)² + y²(D⁺_z f)²) + y (δₓf)(δ_z f)
/// with one-sided D⁺ and centered δ. Its integral is exactly −½⟨f, Δ_H f⟩.
ScalarField horizontal_energy_density(const ScalarField& f);

struct HorizontalGradient {
  MapField x;
  MapField y;
};

HorizontalGradient horizontal_gradient(const MapField& u);
MapField sub_laplacian(const MapField& u);
MapField apply_T(const MapField& u);

/// h³ times a compensated pairwise sum of the samples. The reduction tree
/// depends only on the field size.
double integrate(const ScalarField& f);
double integrate(std::span<const double> values, double cell_volume);

/// ∫ f g.
double inner(const ScalarField& f, const ScalarField& g);
double l2_norm(const ScalarField& f);
double sup_norm(const ScalarField& f);

/// Explicit-Euler stability limit h²/10 of the sub-Laplacian stencil.
double dt_max(const Grid& grid);

/// f + dt Δ_H f. Throws StabilityError when dt exceeds dt_max.
ScalarField linear_heat_step(const ScalarField& f, double dt);

struct OperatorReport {
  double residual_max = 0.0;
  double residual_l2 = 0.0;
  double order_estimate = 0.0;
};

/// Least-squares slope of log(error) against log(h).
double richardson_order(std::span<const double> h, std::span<const double> error);

/// Least-squares slope and intercept of y against x.
std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace subrh
