// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "subrh/config.hpp"
#include "subrh/crgeom.hpp"
#include "subrh/diagnostics.hpp"
#include "subrh/flow.hpp"
#include "subrh/initial_data.hpp"
#include "subrh/lattice.hpp"
#include "subrh/ops.hpp"
#include "subrh/runner.hpp"

using namespace subrh;
namespace fs = std::filesystem;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Line {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double scale_of(int n, double dt) { return 1.0 / (n * n) + dt; }

// Fitted-tolerance check: C = coarse / coarse_scale, then
// fine ≤ max(1.5·C·fine_scale, floor).
struct Fitted {
  double constant = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

Fitted fitted(double coarse, double coarse_scale, double fine, double fine_scale, double floor) {
  Fitted f;
  f.constant = std::max(coarse, 0.0) / coarse_scale;
  f.tolerance = std::max(1.5 * f.constant * fine_scale, floor);
  f.pass = fine <= f.tolerance;
  return f;
}

ScalarField random_field(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  ScalarField f(g);
  for (std::size_t n = 0; n < f.size(); ++n) f[n] = d(rng);
  return f;
}

StopCriteria time_limit(double t_max) {
  StopCriteria s;
  s.tau_tol_l2 = std::numeric_limits<double>::min();
  s.tau_tol_sup = std::numeric_limits<double>::min();
  s.t_max = t_max;
  s.plateau_window = std::numeric_limits<long>::max();
  return s;
}

// ---------------------------------------------------------------------------

void operator_calculus(Line& out) {
  double worst_sbp = 0.0, worst_sym = 0.0, worst_const = 0.0;
  std::vector<double> hs, sup, l2, interior;
  for (int n : {16, 32, 64}) {
    const Grid g(n);
    const ScalarField f = random_field(g, 100 + n);
    const ScalarField h = random_field(g, 200 + n);
    const double s = l2_norm(f) * l2_norm(h);
    worst_sbp = std::max({worst_sbp, std::abs(inner(apply_X(f), h) + inner(f, apply_X(h))) / s,
                          std::abs(inner(apply_Y(f), h) + inner(f, apply_Y(h))) / s,
                          std::abs(inner(apply_T(f), h) + inner(f, apply_T(h))) / s});
    worst_sym = std::max(worst_sym, std::abs(inner(sub_laplacian(f), h) - inner(f, sub_laplacian(h))) / s);
    worst_const = std::max(worst_const, sup_norm(sub_laplacian(ScalarField(g, 2.5))));

    const StructureReport r = structure_check(n, 11);
    hs.push_back(g.h());
    sup.push_back(r.residual_max);
    l2.push_back(r.residual_l2);

    // Residual away from the rows adjacent to the y seam (informational).
    const ScalarField fz = random_smooth_scalar(g, 11, SmoothFieldOptions{.z_dependent = true});
    const ScalarField res = apply_X(apply_Y(fz)) - apply_Y(apply_X(fz)) + apply_T(fz);
    double in = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 1; j < n - 1; ++j)
        for (int k = 0; k < n; ++k) in = std::max(in, std::abs(res.at(i, j, k)));
    interior.push_back(in);
  }
  const double order = richardson_order(hs, sup);
  out.detail << "sbp " << fmt(worst_sbp) << ", symmetry " << fmt(worst_sym) << ", Lap(const) " << worst_const
             << ", [X,Y]+T sup order " << fmt(order) << " (L2 order " << fmt(richardson_order(hs, l2))
             << ", interior sup order " << fmt(richardson_order(hs, interior)) << ")";
  out.require(worst_sbp <= 1e-12, "summation by parts");
  out.require(worst_sym <= 1e-12, "symmetry");
  out.require(worst_const == 0.0, "constants");
  out.require(order >= 1.9, "commutator order >= 1.9 in sup norm");
}

void semigroup_mass(Line& out) {
  const Grid g(32);
  ScalarField u = random_smooth_scalar(g, 7, SmoothFieldOptions{.z_dependent = true});
  const double m0 = integrate(u);
  const double dt = dt_max(g);
  double drift = 0.0;
  for (int s = 0; s < 10000; ++s) {
    u = linear_heat_step(u, dt);
    drift = std::max(drift, std::abs(integrate(u) - m0));
  }
  out.detail << "N=32, 10^4 steps, max |mass drift| " << fmt(drift);
  out.require(drift <= 1e-12, "drift <= 1e-12");
}

void kernel_decay(Line& out) {
  const KernelProbeResult r = heat_kernel_probe(64, 0.005, 0.05);
  out.detail << "N=64 lattice probe, fit on [" << fmt(r.fit_lo) << ", " << fmt(r.fit_hi) << "]: exponent "
             << fmt(r.exponent) << ", mass drift " << fmt(r.max_mass_drift) << ", min u " << fmt(r.min_value);
  out.require(std::abs(r.exponent + 2.0) <= 0.3, "exponent in -2 +- 0.3");
}

void cc_ball(Line& out) {
  const int n = 64;
  const BallScaling b = cc_ball_scaling(n, 4.0 / n, 0.25);
  out.detail << "N=64, delta in [4h, 0.25], " << b.radii.size() << " radii: exponent " << fmt(b.exponent);
  out.require(std::abs(b.exponent - 4.0) <= 0.4, "exponent in 4 +- 0.4");
}

struct ClifFlow {
  int n = 0;
  double scale = 0.0;
  double e0 = 0.0;
  double dt = 0.0;
  MonotonicityReport mono;
  ReebReport reeb;
};

ClifFlow clifford_flow(int n) {
  const Grid g(n);
  const Target t = make_target("clifford");
  InitialDataOptions opts;
  opts.z_dependent = true;
  opts.max_mode = 2;
  FlowOptions fo;
  fo.dt = dt_max(g);
  const FlowResult r = run_flow(FlowState{initial_map(t, g, 7, opts), t, 0.0, 0}, time_limit(0.3), fo);
  if (r.termination == Termination::Aborted) throw std::runtime_error("clifford flow aborted: " + r.error);
  ClifFlow c;
  c.n = n;
  c.dt = fo.dt;
  c.scale = scale_of(n, fo.dt);
  c.e0 = r.records.front().e_h;
  c.mono = monotonicity_report(r.records, t.curvature_sign(), MonotonicityOptions{});
  c.reeb = reeb_bound_report(r.records, 0.05, 0.0);
  return c;
}

void energy_identity(Line& out, const ClifFlow& a, const ClifFlow& b) {
  const Fitted f = fitted(a.mono.max_identity_residual, a.scale, b.mono.max_identity_residual, b.scale,
                          64 * kEps * b.e0 / b.dt);
  out.detail << "C fitted at N=16: " << fmt(f.constant) << "; N=32 residual " << fmt(b.mono.max_identity_residual)
             << " vs 1.5*C*(h^2+dt) = " << fmt(f.tolerance) << "; max E_H increase N=32 "
             << fmt(b.mono.max_increase);
  out.require(f.pass, "N=32 residual within fitted bound");
  out.require(b.mono.max_increase <= 1e-12 && a.mono.max_increase <= 1e-12, "E_H nonincreasing");
}

void convexity(Line& out, const ClifFlow& a, const ClifFlow& b) {
  const double na = std::max(0.0, -a.mono.min_second_difference);
  const double nb = std::max(0.0, -b.mono.min_second_difference);
  const Fitted f = fitted(na, a.scale, nb, b.scale, 64 * kEps * b.e0 / (b.dt * b.dt));
  out.detail << "min second difference N=16 " << fmt(a.mono.min_second_difference) << ", N=32 "
             << fmt(b.mono.min_second_difference) << "; tolerance " << fmt(f.tolerance);
  out.require(f.pass, "second difference >= -C(h^2+dt)");
}

void reeb_bound(Line& out, const ClifFlow& a, const ClifFlow& b) {
  const double na = std::max(0.0, -a.reeb.min_slack);
  const double nb = std::max(0.0, -b.reeb.min_slack);
  const Fitted f = fitted(na, a.scale, nb, b.scale, 64 * kEps * b.e0);
  out.detail << "t0 = " << fmt(b.reeb.t0) << ", min slack N=16 " << fmt(a.reeb.min_slack) << ", N=32 "
             << fmt(b.reeb.min_slack) << "; tolerance " << fmt(f.tolerance) << "; tail slack N=32 "
             << fmt(b.reeb.tail_slack);
  out.require(f.pass, "bound holds up to C(h^2+dt)");
}

void rho_lemma(Line& out) {
  const Grid g(16);
  const Target t = make_target("sphere2");
  InitialDataOptions opts;
  opts.z_dependent = true;
  opts.radial_offset = 0.05;
  FlowState s{initial_map(t, g, 7, opts), t, 0.0, 0};
  const StepOptions so{.reproject_every = 0};
  double prev = rho_l2(s.u, t.embedded());
  const double first = prev;
  double worst = 0.0;
  for (int n = 0; n < 2000; ++n) {
    s = step_explicit(s, dt_max(g), so);
    const double r = rho_l2(s.u, t.embedded());
    worst = std::max(worst, r - prev);
    prev = r;
  }
  out.detail << "sphere2, N=16, 2000 steps without re-projection: rho " << fmt(first) << " -> " << fmt(prev)
             << ", max increase " << fmt(worst);
  out.require(worst <= 1e-10, "slack >= -1e-10");
}

void convergence(Line& out) {
  {
    const Grid g(16);
    const Target t = make_target("clifford");
    InitialDataOptions opts;
    opts.z_dependent = true;
    opts.max_mode = 2;
    const MapField u0 = initial_map(t, g, 7, opts);
    FlowOptions fo;
    fo.dt = dt_max(g);
    fo.record_every = 1000;
    StopCriteria sc = time_limit(50.0);
    sc.tau_tol_l2 = 1e-6;
    const FlowResult r = run_flow(FlowState{u0, t, 0.0, 0}, sc, fo);
    const WindingNumbers w0 = winding_numbers(u0);
    const WindingNumbers w1 = winding_numbers(r.state.u);
    out.detail << "clifford: " << to_string(r.termination) << " after " << r.state.step << " steps, tau_l2 "
               << fmt(r.records.back().tau_l2) << ", winding [" << w1.matrix[0] << " " << w1.matrix[1] << "; "
               << w1.matrix[2] << " " << w1.matrix[3] << "]";
    out.require(r.termination == Termination::TensionL2, "clifford reaches tau_l2 <= 1e-6");
    out.require(w0.matrix == w1.matrix && w0.consistent && w1.consistent, "winding preserved");
  }
  {
    const Grid g(16);
    const Target t = make_target("poincare");
    InitialDataOptions opts;
    opts.z_dependent = true;
    opts.amplitude = 0.3;
    FlowState s{initial_map(t, g, 7, opts), t, 0.0, 0};
    const double e0 = energies(s.u, t).e_h;
    double e = e0;
    while (e > 1e-8 && s.t < 50.0) {
      for (int k = 0; k < 50; ++k) s = step_explicit(s, dt_max(g));
      e = energies(s.u, t).e_h;
    }
    out.detail << "; poincare: E_H " << fmt(e0) << " -> " << fmt(e) << " at t = " << fmt(s.t);
    out.require(e <= 1e-8, "poincare reaches E_H <= 1e-8");
  }
}

void picard(Line& out) {
  const Target t = make_target("clifford");
  InitialDataOptions opts;
  opts.amplitude = 1.0;
  opts.winding = {0, 0, 0, 0};
  const Grid g16(16);
  const MapField phi16 = initial_map(t, g16, 7, opts);
  const std::vector<double> horizons{0.001, 0.002, 0.004, 0.008, 0.016, 0.032, 0.064};
  std::vector<double> max_ratio;
  for (double th : horizons) {
    const PicardResult r = duhamel_picard(phi16, t.embedded(), th, 6, dt_max(g16));
    double m = r.diverged ? std::numeric_limits<double>::infinity() : 0.0;
    for (double x : r.ratios) m = std::max(m, x);
    max_ratio.push_back(m);
  }
  double threshold = 0.0;
  for (std::size_t i = 0; i < horizons.size() && max_ratio[i] <= 0.5; ++i) threshold = horizons[i];
  double min_rise = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < max_ratio.size(); ++i) min_rise = std::min(min_rise, max_ratio[i] - max_ratio[i - 1]);

  // log-log slope of the ratio against the horizon below the threshold (informational)
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < horizons.size(); ++i)
    if (horizons[i] <= threshold && max_ratio[i] > 0.0) {
      lx.push_back(std::log(horizons[i]));
      ly.push_back(std::log(max_ratio[i]));
    }
  const double beta = lx.size() >= 2 ? linear_fit(lx, ly).first : std::nan("");

  auto agreement = [&](int n) {
    const Grid g(n);
    const MapField phi = initial_map(t, g, 7, opts);
    const PicardResult r = duhamel_picard(phi, t.embedded(), 0.008, 6, dt_max(g));
    FlowOptions fo;
    fo.dt = r.dt;
    fo.record_every = std::numeric_limits<long>::max();
    fo.step.reproject_every = 0;
    const FlowResult f = run_flow(FlowState{phi, t, 0.0, 0}, time_limit(0.008), fo);
    if (f.termination == Termination::Aborted) throw std::runtime_error(f.error);
    return std::pair{sup_distance(f.state.u, r.iterates.back()), scale_of(n, r.dt)};
  };
  const auto [d16, s16] = agreement(16);
  const auto [d32, s32] = agreement(32);
  const Fitted f = fitted(d16, s16, d32, s32, 1e-12);

  out.detail << "max ratios";
  for (std::size_t i = 0; i < horizons.size(); ++i) out.detail << " " << fmt(horizons[i]) << ":" << fmt(max_ratio[i]);
  out.detail << "; threshold " << fmt(threshold) << ", beta " << fmt(beta) << "; flow agreement at t=0.008: N=16 "
             << fmt(d16) << ", N=32 " << fmt(d32) << " (tolerance " << fmt(f.tolerance) << ")";
  out.require(threshold > 0.0, "ratio <= 0.5 below a threshold");
  out.require(min_rise >= -1e-3, "ratios monotone in t_horizon");
  out.require(f.pass, "agreement with run_flow O(h^2+dt)");
}

void distance_monotone(Line& out) {
  const Target t = make_target("clifford");
  InitialDataOptions opts;
  opts.amplitude = 0.3;
  auto worst_rise = [&](int n) {
    const Grid g(n);
    FlowState a{initial_map(t, g, 7, opts), t, 0.0, 0};
    FlowState b{initial_map(t, g, 8, opts), t, 0.0, 0};
    const double dt = dt_max(g);
    double prev = map_distance(a.u, b.u, t);
    double rise = 0.0;
    while (a.t < 0.1 - 1e-12) {
      a = step_explicit(a, dt);
      b = step_explicit(b, dt);
      const double d = map_distance(a.u, b.u, t);
      rise = std::max(rise, d - prev);
      prev = d;
    }
    return std::pair{rise, scale_of(n, dt)};
  };
  const auto [r16, s16] = worst_rise(16);
  const auto [r32, s32] = worst_rise(32);
  const Fitted f = fitted(r16, s16, r32, s32, 64 * kEps);
  out.detail << "seeds 7/8, t in [0, 0.1]: max distance increase N=16 " << fmt(r16) << ", N=32 " << fmt(r32)
             << " (tolerance " << fmt(f.tolerance) << ")";
  out.require(f.pass, "distance nonincreasing up to C(h^2+dt)");
}

void hartman(Line& out) {
  const Target t = make_target("clifford");
  const double tau_tol = 1e-6;
  auto profile = [&](int n) {
    const Grid g(n);
    return geodesic_homotopy_suite(standard_torus_map(g), standard_torus_map(g, 0.3, 0.7), t, 8);
  };
  const HomotopyProfile a = profile(16);
  const HomotopyProfile b = profile(32);
  const double h16 = 1.0 / 256, h32 = 1.0 / 1024;
  const Fitted f = fitted(a.max_energy_deviation, h16, b.max_energy_deviation, h32, 64 * kEps * b.energy.front());
  out.detail << "max |E_H(s) - E_H(0)| N=16 " << fmt(a.max_energy_deviation) << ", N=32 "
             << fmt(b.max_energy_deviation) << " (tolerance " << fmt(f.tolerance) << "); max tau_l2 "
             << fmt(std::max(a.max_tau_l2, b.max_tau_l2));
  out.require(f.pass, "energy constant to C h^2");
  out.require(std::max(a.max_tau_l2, b.max_tau_l2) <= 10 * tau_tol, "tension <= 10 tau_tol");
  out.require(a.winding_constant && b.winding_constant, "winding constant");
}

void analytic_map(Line& out) {
  const Target t = make_target("clifford");
  std::vector<double> hs, tau, err;
  bool reeb_zero = true;
  for (int n : {16, 32, 64}) {
    const Grid g(n);
    const MapField u = standard_torus_map(g);
    const MapField r = tension(u, t);
    double m = 0.0;
    for (int a = 0; a < r.k(); ++a) m = std::max(m, sup_norm(r[a]));
    const Energies e = energies(u, t);
    hs.push_back(g.h());
    tau.push_back(m);
    err.push_back(std::abs(e.e_h - 2 * std::numbers::pi * std::numbers::pi));
    reeb_zero = reeb_zero && e.e_r == 0.0;
  }
  const double order = richardson_order(hs, tau);
  const Fitted f32 = fitted(err[0], hs[0] * hs[0], err[1], hs[1] * hs[1], 64 * kEps);
  const Fitted f64 = fitted(err[0], hs[0] * hs[0], err[2], hs[2] * hs[2], 64 * kEps);
  out.detail << "tau_sup " << fmt(tau[0]) << ", " << fmt(tau[1]) << ", " << fmt(tau[2]) << " (order " << fmt(order)
             << "); |E_H - 2 pi^2| " << fmt(err[0]) << ", " << fmt(err[1]) << ", " << fmt(err[2]) << " (C "
             << fmt(f32.constant) << "); E_R exactly 0: " << (reeb_zero ? "yes" : "no");
  out.require(order >= 1.9, "tension order >= 1.9");
  out.require(f32.pass && f64.pass, "E_H = 2 pi^2 +- C h^2");
  out.require(reeb_zero, "E_R = 0");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void reproducibility(Line& out) {
  const fs::path base = fs::temp_directory_path() / "subrh_acceptance_repro";
  fs::remove_all(base);
  Config c = Config::parse_string(
      "scenario = flow\ngrid.n = 16\ntarget.name = clifford\ninitial.z_dependent = true\n"
      "stop.t_max = 0.05\nrun.seed = 7\nrun.snapshots = false\n");
  c.set("run.out_dir", (base / "a").string());
  run(make_run_config(c));
  c.set("run.out_dir", (base / "b").string());
  run(make_run_config(c));
  const std::string a = slurp(base / "a" / "records.csv");
  const std::string b = slurp(base / "b" / "records.csv");
  const bool same = !a.empty() && a == b;
  const bool same_summary = slurp(base / "a" / "summary.json") == slurp(base / "b" / "summary.json");
  out.detail << "flow, clifford, seed 7: records.csv " << a.size() << " bytes, identical: " << (same ? "yes" : "no")
             << ", summary.json identical: " << (same_summary ? "yes" : "no");
  out.require(same, "records.csv byte-identical");
  out.require(same_summary, "summary.json byte-identical");
  fs::remove_all(base);
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<void(Line&)>& body) {
    Line line;
    const auto start = std::chrono::steady_clock::now();
    try {
      body(line);
    } catch (const std::exception& e) {
      line.pass = false;
      line.detail << " [error: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!line.pass) ++failures;
    std::printf("criterion %2d %s  %s: %s (%.1f s)\n", id, line.pass ? "PASS" : "FAIL", name, line.detail.str().c_str(),
                secs);
    std::fflush(stdout);
  };

  report(1, "operator calculus", operator_calculus);
  report(2, "semigroup mass", semigroup_mass);
  report(3, "kernel decay", kernel_decay);
  report(4, "CC-ball scaling", cc_ball);

  ClifFlow coarse, fine;
  bool have_flows = true;
  std::string flow_error;
  try {
    coarse = clifford_flow(16);
    fine = clifford_flow(32);
  } catch (const std::exception& e) {
    have_flows = false;
    flow_error = e.what();
  }
  auto with_flows = [&](void (*fn)(Line&, const ClifFlow&, const ClifFlow&)) {
    return [&, fn](Line& l) {
      if (!have_flows) throw std::runtime_error(flow_error);
      l.detail << "clifford, seed 7, z-dependent, N=16/32, t in [0, 0.3]: ";
      fn(l, coarse, fine);
    };
  };
  report(5, "energy identity", with_flows(energy_identity));
  report(6, "energy convexity", with_flows(convexity));
  report(7, "Reeb bound", with_flows(reeb_bound));
  report(8, "rho lemma", rho_lemma);
  report(9, "convergence", convergence);
  report(10, "Picard contraction", picard);
  report(11, "distance monotonicity", distance_monotone);
  report(12, "geodesic homotopy energy", hartman);
  report(13, "analytic pseudo-harmonic map", analytic_map);
  report(14, "reproducibility", reproducibility);

  std::printf("%d of 14 criteria passed\n", 14 - failures);
  return failures == 0 ? 0 : 1;
}
