#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "oracle_values.hpp"
#include "subrh/diagnostics.hpp"
#include "subrh/initial_data.hpp"
#include "subrh/lattice.hpp"
#include "subrh/ops.hpp"

using namespace subrh;

namespace {

DiagnosticsRecord rec(double t, double e_h, double tau_l2, double e_r = 0.0) {
  DiagnosticsRecord r;
  r.t = t;
  r.e_h = e_h;
  r.e_r = e_r;
  r.e_total = e_h + e_r;
  r.tau_l2 = tau_l2;
  return r;
}

// E_H(t) = e^{-2t}: dE/dt = −2E, so the matching ‖τ‖² is 2E.
std::vector<DiagnosticsRecord> exponential_decay(double dt, int count) {
  std::vector<DiagnosticsRecord> out;
  for (int n = 0; n < count; ++n) {
    const double t = n * dt;
    out.push_back(rec(t, std::exp(-2 * t), std::sqrt(2 * std::exp(-2 * t))));
  }
  return out;
}

}  // namespace

TEST_CASE("energies") {
  SUBCASE("constant map") {
    const Grid g(8);
    const std::vector<double> p{0.0, 0.0, 1.0};
    const Energies e = energies(constant_map(g, p), make_target("sphere2"));
    CHECK(e.e_h == 0.0);
    CHECK(e.e_r == 0.0);
    CHECK(e.e_total == 0.0);
  }
  SUBCASE("standard torus map: 2 pi^2 + O(h^2), no Reeb energy") {
    const Target t = make_target("clifford");
    std::vector<double> hs, err;
    for (int n : {16, 32, 64}) {
      const Grid g(n);
      const Energies e = energies(standard_torus_map(g), t);
      CHECK(e.e_r == 0.0);
      CHECK(std::abs(e.e_total - (e.e_h + e.e_r)) <= 1e-14 * e.e_total);
      hs.push_back(g.h());
      err.push_back(std::abs(e.e_h - oracle::kTorusMapEnergy));
    }
    CHECK(err[2] / (hs[2] * hs[2]) <= 1.05 * err[0] / (hs[0] * hs[0]));
    CHECK(richardson_order(hs, err) >= 1.9);
  }
  SUBCASE("z-independent maps have zero Reeb energy") {
    const Grid g(16);
    for (const char* name : {"sphere2", "clifford", "poincare"}) {
      const Target t = make_target(name);
      const Energies e = energies(initial_map(t, g, 3, InitialDataOptions{.z_dependent = false}), t);
      CHECK(e.e_r == 0.0);
      CHECK(e.e_h > 0.0);
    }
  }
  SUBCASE("z-dependent data has Reeb energy") {
    const Grid g(16);
    const Target t = make_target("clifford");
    const Energies e = energies(initial_map(t, g, 3, InitialDataOptions{.z_dependent = true}), t);
    CHECK(e.e_r > 0.0);
    CHECK(e.e_total == doctest::Approx(e.e_h + e.e_r).epsilon(1e-14));
  }
  SUBCASE("intrinsic energy is the metric contraction") {
    // Flat torus chart: h = R² δ, so E_H equals R² times the scalar energy of the angles.
    const Grid g(16);
    const Target t = make_target("flat_torus");
    const MapField u = initial_map(t, g, 5, InitialDataOptions{.amplitude = 0.4, .winding = {0, 0, 0, 0}});
    const double r2 = CliffordTorus::kRadius * CliffordTorus::kRadius;
    const double expected = r2 * (integrate(horizontal_energy_density(u[0])) + integrate(horizontal_energy_density(u[1])));
    CHECK(energies(u, t).e_h == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("monotonicity report") {
  SUBCASE("stationary flow passes with zero slack") {
    std::vector<DiagnosticsRecord> rs{rec(0, 1.0, 0), rec(0.1, 1.0, 0), rec(0.2, 1.0, 0)};
    const MonotonicityReport r = monotonicity_report(rs, CurvatureSign::Zero, {});
    CHECK(r.nonincreasing.pass);
    CHECK(r.energy_identity.pass);
    CHECK(r.convexity.pass);
    CHECK(r.nonincreasing.slack == 0.0);
    CHECK(r.energy_identity.slack == 0.0);
    CHECK(r.convexity.slack == 0.0);
  }
  SUBCASE("identity residual is first order in the sampling interval") {
    const auto coarse = monotonicity_report(exponential_decay(0.01, 50), CurvatureSign::Zero, {});
    const auto fine = monotonicity_report(exponential_decay(0.005, 100), CurvatureSign::Zero, {});
    CHECK(coarse.max_identity_residual > 0.0);
    CHECK(fine.max_identity_residual / coarse.max_identity_residual == doctest::Approx(0.25).epsilon(0.05));
    CHECK(coarse.min_second_difference > 0.0);
  }
  SUBCASE("an increase fails, convexity exempt for positive curvature") {
    std::vector<DiagnosticsRecord> rs{rec(0, 1.0, 0), rec(0.1, 0.5, 0), rec(0.2, 0.6, 0)};
    const MonotonicityReport r = monotonicity_report(rs, CurvatureSign::Positive, {});
    CHECK_FALSE(r.nonincreasing.pass);
    CHECK(r.max_increase == doctest::Approx(0.1));
    CHECK_FALSE(r.convexity_checked);
    CHECK(r.convexity.pass);
  }
}

TEST_CASE("Reeb bound report") {
  SUBCASE("vanishing Reeb energy") {
    const auto rs = exponential_decay(0.01, 20);
    const ReebReport r = reeb_bound_report(rs, 0.05, 0.0);
    CHECK(r.bound.pass);
    CHECK(r.tail.pass);
    CHECK(r.t0 == doctest::Approx(0.05));
  }
  SUBCASE("exact exponential decay sits on the bound") {
    std::vector<DiagnosticsRecord> rs;
    for (int n = 0; n <= 10; ++n) rs.push_back(rec(0.1 * n, 0.0, 0.0, std::exp(-2 * 0.1 * n)));
    const ReebReport r = reeb_bound_report(rs, 0.0, 1e-14);
    CHECK(std::abs(r.min_slack) <= 1e-14);
    CHECK(r.bound.pass);
  }
  SUBCASE("violations and missing t0") {
    std::vector<DiagnosticsRecord> rs{rec(0, 0, 0.1, 0.1), rec(1, 0, 0.1, 0.5)};
    CHECK_FALSE(reeb_bound_report(rs, 0.0, 0.0).bound.pass);
    CHECK_THROWS_AS(reeb_bound_report(rs, 5.0, 0.0), std::invalid_argument);
  }
}

TEST_CASE("per-record annotation") {
  auto rs = exponential_decay(0.01, 10);
  annotate_records(rs, CurvatureSign::Positive, AnnotationOptions{.reeb_t0 = 0.05});
  for (const auto& r : rs) {
    REQUIRE(r.verdicts.size() == 4u);
    CHECK(r.verdicts[0].name == "energy_nonincreasing");
    CHECK(r.verdicts[1].name == "energy_identity");
    CHECK(r.verdicts[2].name == "energy_convexity");
    CHECK(r.verdicts[3].name == "reeb_bound");
    CHECK(r.verdicts[0].pass);
    CHECK(r.verdicts[2].slack == 0.0);
  }
  CHECK(rs[0].verdicts[1].slack == 0.0);
  CHECK(rs[3].verdicts[3].slack == 0.0);
  CHECK(rs[9].verdicts[3].slack > 0.0);
}

TEST_CASE("CC distance and balls") {
  const int n = 16;
  const double h = 1.0 / n;
  CHECK(cc_distance(n, {3, 0, 5}, {3, 0, 5}) == 0.0);
  CHECK(cc_distance(n, {3, 0, 5}, {4, 0, 5}) == doctest::Approx(h));
  CHECK(cc_distance(n, {3, 2, 5}, {3, 3, 5}) == doctest::Approx(h));
  // A z-displacement of one grid cell costs more than any single horizontal move.
  CHECK(cc_distance(n, {3, 2, 5}, {3, 2, 6}) > 2 * h);
  CHECK(cc_distance(n, {1, 2, 3}, {9, 11, 7}) == doctest::Approx(cc_distance(n, {9, 11, 7}, {1, 2, 3})));

  double prev = 0.0;
  for (double d : {2 * h, 4 * h, 8 * h}) {
    const double v = cc_ball_volume(n, {0, 0, 0}, d);
    CHECK(v > prev);
    prev = v;
  }
  const HorizontalLattice lat(n);
  CHECK(cc_ball_volume(n, {0, 0, 0}, 0.0) == doctest::Approx(lat.cell_volume()));
}

TEST_CASE("lattice geometry") {
  const HorizontalLattice lat(8);
  CHECK(lat.nz() == 64);
  // Each node has four distinct neighbors and moves are invertible.
  for (std::size_t idx = 0; idx < lat.size(); idx += 37) {
    const auto nb = lat.neighbors(idx);
    CHECK(lat.neighbors(nb[0])[1] == idx);
    CHECK(lat.neighbors(nb[2])[3] == idx);
  }
  // The commutator of X and Y moves is a pure z-shift by one lattice cell.
  const std::size_t o = lat.index(3, 4, 10);
  const std::size_t loop = lat.neighbors(lat.neighbors(lat.neighbors(lat.neighbors(o)[0])[2])[1])[3];
  CHECK(loop != o);
  CHECK((loop == lat.index(3, 4, 11) || loop == lat.index(3, 4, 9)));
}

TEST_CASE("heat kernel probes") {
  SUBCASE("lattice probe: exact mass and positivity") {
    const KernelProbeResult r = heat_kernel_probe(16, 0.01, 0.05);
    CHECK(r.max_mass_drift <= 1e-12);
    CHECK(r.min_value >= 0.0);
    CHECK(r.times.size() == r.sups.size());
    for (std::size_t n = 1; n < r.sups.size(); ++n) CHECK(r.sups[n] <= r.sups[n - 1]);
  }
  SUBCASE("grid probe keeps mass to 1e-12") {
    const KernelProbeResult r = grid_heat_kernel_probe(16, 0.01, 0.05);
    CHECK(r.max_mass_drift <= 1e-12);
    CHECK(r.exponent < 0.0);
  }
}

TEST_CASE("max principle and smoothing probes") {
  const Grid g(16);
  const ScalarField u0 = random_smooth_scalar(g, 4, SmoothFieldOptions{.z_dependent = true});
  const MaxPrincipleReport m = max_principle_probe(u0, 0.02);
  CHECK(std::isfinite(m.fitted_constant));
  CHECK(m.max_excess <= m.fitted_constant * 0.02 * g.h() * g.h() + 1e-15);

  const SmoothingReport s = smoothing_probe(16, 0.05);
  CHECK(s.ratios.size() > 5);
  CHECK(s.nonmonotone_fraction <= 0.05);
}

TEST_CASE("map distance") {
  const Grid g(8);
  const Target t = make_target("clifford");
  const MapField u = standard_torus_map(g);
  CHECK(map_distance(u, u, t) == 0.0);
  const MapField v = standard_torus_map(g, 0.3, 0.7);
  const double expected = CliffordTorus::kRadius * std::hypot(0.3, 0.7);
  CHECK(map_distance(u, v, t) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("winding numbers") {
  const Grid g(16);
  const Target t = make_target("clifford");
  SUBCASE("constant map") {
    std::vector<double> p(4);
    CliffordTorus::from_angles(1.0, 2.0, p);
    const WindingNumbers w = winding_numbers(constant_map(g, p));
    CHECK(w.matrix == std::array<int, 4>{0, 0, 0, 0});
    CHECK(w.consistent);
  }
  SUBCASE("standard map is the identity") {
    const WindingNumbers w = winding_numbers(standard_torus_map(g));
    CHECK(w.matrix == std::array<int, 4>{1, 0, 0, 1});
    CHECK(w.max_residual < 0.1);
  }
  SUBCASE("random data with a prescribed class") {
    const std::array<int, 4> m{2, 1, 0, 1};
    const WindingNumbers w = winding_numbers(initial_map(t, g, 9, InitialDataOptions{.z_dependent = true, .winding = m}));
    CHECK(w.matrix == m);
    CHECK(w.max_residual < 0.1);
  }
}

TEST_CASE("geodesic homotopy") {
  const Grid g(16);
  const Target t = make_target("clifford");
  const MapField u = standard_torus_map(g);
  SUBCASE("u = v is a constant profile") {
    const HomotopyProfile p = geodesic_homotopy_suite(u, u, t, 4);
    CHECK(p.s.size() == 5u);
    CHECK(p.max_energy_deviation == 0.0);
    for (double x : p.tau_l2) CHECK(std::abs(x - p.tau_l2[0]) <= 1e-12);
    CHECK(p.winding_constant);
  }
  SUBCASE("endpoints") {
    const MapField v = standard_torus_map(g, 0.3, 0.7);
    CHECK(sup_distance(geodesic_homotopy(u, v, t, 0.0), u) <= 1e-15);
    CHECK(sup_distance(geodesic_homotopy(u, v, t, 1.0), v) <= 1e-14);
  }
}
