#pragma once

#include <array>
#include <span>
#include <vector>

#include "subrh/fields.hpp"
#include "subrh/flow.hpp"
#include "subrh/records.hpp"
#include "subrh/targets.hpp"

namespace subrh {

struct Energies {
  double e_h = 0.0;
  double e_r = 0.0;
  double e_total = 0.0;
  ScalarField density_h;
  ScalarField density_r;
};

/// e_H ≈ ½ Σ_a ((Xu^a)² + (Yu^a)²) in the compact form matching Δ_H (see
/// diagnostics.cpp), e_R = ½ Σ_a (Tu^a)² in extrinsic mode;
/// the same contracted with h_ij(f) in intrinsic mode.
Energies energies(const MapField& u, const Target& target);

/// ∫ |ρ(u)|².
double rho_l2(const MapField& u, const EmbeddedTarget& target);

DiagnosticsRecord make_record(const MapField& u, const Target& target, const TensionNorms& norms);

/// C·(h² + dt).
double consistency_scale(double h, double dt);

struct MonotonicityOptions {
  /// Allowed energy increase between consecutive records.
  double monotone_tolerance = 1e-12;
  /// Bound on |ΔE_H/Δt + ‖τ‖²| (trapezoidal ‖τ‖² over each interval).
  double identity_tolerance = 0.0;
  /// Allowed negative second difference (scaled by 1/Δt²).
  double convexity_tolerance = 0.0;
};

struct MonotonicityReport {
  Verdict nonincreasing;
  Verdict energy_identity;
  Verdict convexity;
  bool convexity_checked = false;
  /// Largest E_H increase between records (≤ 0 when monotone).
  double max_increase = 0.0;
  double max_identity_residual = 0.0;
  /// Most negative (E_{n+1} − 2E_n + E_{n−1})/Δt².
  double min_second_difference = 0.0;
};

/// Convexity is only checked for nonpositively curved targets.
MonotonicityReport monotonicity_report(std::span<const DiagnosticsRecord> records, CurvatureSign curvature,
                                       const MonotonicityOptions& opts);

struct ReebReport {
  Verdict bound;
  Verdict tail;
  double t0 = 0.0;
  /// min over t > t0 of ½‖τ(t0)‖² + E_R(t0) e^{2(t0 − t)} − E_R(t).
  double min_slack = 0.0;
  /// ½‖τ(t0)‖² − E_R(t_last).
  double tail_slack = 0.0;
};

/// Reeb-energy bound with m = 1 and vanishing curvature/torsion constant.
ReebReport reeb_bound_report(std::span<const DiagnosticsRecord> records, double t0, double tolerance);

struct AnnotationOptions {
  MonotonicityOptions monotonicity;
  double reeb_t0 = 0.05;
  double reeb_tolerance = 0.0;
};

/// Attaches per-sample verdicts to each record: energy_nonincreasing and
/// energy_identity over the interval ending at the record, energy_convexity
/// over the three records ending there (exempt targets report 0), and
/// reeb_bound for t > t0. Earlier samples without enough history get slack 0.
void annotate_records(std::vector<DiagnosticsRecord>& records, CurvatureSign curvature,
                      const AnnotationOptions& opts);

struct KernelProbeResult {
  std::vector<double> times;
  std::vector<double> sups;
  double exponent = 0.0;
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  double max_mass_drift = 0.0;
  /// min u over samples with t ≥ 4h².
  double min_value = 0.0;
};

/// Spike of unit mass evolved by the lattice sub-Laplacian; fits
/// log sup u against log t on [fit_lo, fit_hi].
KernelProbeResult heat_kernel_probe(int grid_n, double fit_lo, double fit_hi);

/// Same probe on the N³ grid with linear_heat_step.
KernelProbeResult grid_heat_kernel_probe(int grid_n, double fit_lo, double fit_hi);

struct MaxPrincipleReport {
  double initial_sup = 0.0;
  /// max_t (sup u(t) − sup u(0)).
  double max_excess = 0.0;
  /// max_excess / (t h²).
  double fitted_constant = 0.0;
};

MaxPrincipleReport max_principle_probe(const ScalarField& u0, double t_end);

struct SmoothingReport {
  std::vector<double> times;
  std::vector<double> ratios;
  double nonmonotone_fraction = 0.0;
};

/// ‖Δ_H u(t)‖/‖u(t)‖ for unit spike data under linear_heat_step, sampled
/// after t ≥ 4h².
SmoothingReport smoothing_probe(int grid_n, double t_end, int samples = 40);

/// sup_p d_N(u(p), v(p)).
double map_distance(const MapField& u, const MapField& v, const Target& target);

struct WindingNumbers {
  /// Row = target angle (α₁, α₂), column = domain cycle (x, y).
  std::array<int, 4> matrix{};
  double max_residual = 0.0;
  bool consistent = true;
};

/// Winding of a map into the Clifford torus along the x- and y-cycles of
/// Nil³, evaluated through every grid line.
WindingNumbers winding_numbers(const MapField& u);

struct HomotopyProfile {
  std::vector<double> s;
  std::vector<double> energy;
  std::vector<double> tau_l2;
  std::vector<double> tau_sup;
  double max_energy_deviation = 0.0;
  double max_tau_l2 = 0.0;
  double max_tau_sup = 0.0;
  bool winding_constant = true;
};

/// Pointwise geodesic homotopy Φ_s between u and v, s = 0, 1/S, …, 1.
HomotopyProfile geodesic_homotopy_suite(const MapField& u, const MapField& v, const Target& target, int subdivisions);

MapField geodesic_homotopy(const MapField& u, const MapField& v, const Target& target, double s);

}  // namespace subrh
