#include "subrh/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "subrh/lattice.hpp"
#include "subrh/ops.hpp"

namespace subrh {

namespace {

using Buf = std::array<double, kMaxTargetDim>;

std::span<double> first(Buf& b, int n) { return std::span(b).first(static_cast<std::size_t>(n)); }

Verdict make_verdict(std::string name, double slack, double tolerance) {
  return Verdict{std::move(name), slack, tolerance, slack >= -tolerance};
}

// Sample step numbers roughly uniform in log t between first and last.
std::vector<long> log_spaced_steps(long first_step, long last_step, int per_decade) {
  std::vector<long> steps;
  const double lo = std::log10(static_cast<double>(std::max(1L, first_step)));
  const double hi = std::log10(static_cast<double>(last_step));
  const int count = std::max(2, static_cast<int>(std::ceil((hi - lo) * per_decade)) + 1);
  for (int c = 0; c < count; ++c) {
    const long s = std::lround(std::pow(10.0, lo + (hi - lo) * c / (count - 1)));
    if (steps.empty() || s > steps.back()) steps.push_back(s);
  }
  return steps;
}

KernelProbeResult fit_probe(KernelProbeResult r) {
  std::vector<double> lx, ly;
  for (std::size_t n = 0; n < r.times.size(); ++n)
    if (r.times[n] >= r.fit_lo * (1 - 1e-9) && r.times[n] <= r.fit_hi * (1 + 1e-9)) {
      lx.push_back(std::log(r.times[n]));
      ly.push_back(std::log(r.sups[n]));
    }
  if (lx.size() < 2) throw std::invalid_argument("kernel probe fit window holds fewer than two samples");
  r.exponent = linear_fit(lx, ly).first;
  return r;
}

}  // namespace

namespace {

// Difference quotients of one component at a grid point: forward along x, y
// and z, centered along x and z.
struct Differences {
  double dx, dy, dz, cx, cz;
};

Differences differences(const ScalarField& f, int i, int j, int k) {
  const double inv = 1.0 / f.grid().h();
  const double c = f.at(i, j, k);
  const double xp = f.get_wrapped(i + 1, j, k);
  const double xm = f.get_wrapped(i - 1, j, k);
  const double zp = f.get_wrapped(i, j, k + 1);
  const double zm = f.get_wrapped(i, j, k - 1);
  return {(xp - c) * inv, (f.get_wrapped(i, j + 1, k) - c) * inv, (zp - c) * inv, 0.5 * (xp - xm) * inv,
          0.5 * (zp - zm) * inv};
}

}  // namespace

// The horizontal density is the compact form matching the discrete Δ_H (see
// horizontal_energy_density); intrinsic mode contracts the same difference
// quotients with h_ij(f).
Energies energies(const MapField& u, const Target& target) {
  const int dim = u.k();
  const Grid& g = u.grid();
  const int n = g.n();
  const MapField tu = apply_T(u);
  Energies e{0.0, 0.0, 0.0, ScalarField(g), ScalarField(g)};
  if (target.mode() == Mode::Extrinsic) {
    for (int a = 0; a < dim; ++a) {
      e.density_h += horizontal_energy_density(u[a]);
      for (std::size_t idx = 0; idx < u.points(); ++idx) e.density_r[idx] += 0.5 * tu[a][idx] * tu[a][idx];
    }
    e.e_h = integrate(e.density_h);
    e.e_r = integrate(e.density_r);
    e.e_total = e.e_h + e.e_r;
    return e;
  }
  const auto& c = target.chart();
  Buf p{}, dx{}, dy{}, dz{}, cx{}, cz{}, gt{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double y = g.y(j);
      for (int k = 0; k < n; ++k) {
        const std::size_t idx = g.index(i, j, k);
        for (int a = 0; a < dim; ++a) {
          const auto d = differences(u[a], i, j, k);
          const auto s = static_cast<std::size_t>(a);
          dx[s] = d.dx;
          dy[s] = d.dy;
          dz[s] = d.dz;
          cx[s] = d.cx;
          cz[s] = d.cz;
        }
        u.point(idx, first(p, dim));
        tu.point(idx, first(gt, dim));
        const auto pt = first(p, dim);
        e.density_h[idx] = 0.5 * (c.metric_pair(pt, first(dx, dim), first(dx, dim)) +
                                  c.metric_pair(pt, first(dy, dim), first(dy, dim)) +
                                  y * y * c.metric_pair(pt, first(dz, dim), first(dz, dim))) +
                           y * c.metric_pair(pt, first(cx, dim), first(cz, dim));
        e.density_r[idx] = 0.5 * c.metric_pair(pt, first(gt, dim), first(gt, dim));
      }
    }
  e.e_h = integrate(e.density_h);
  e.e_r = integrate(e.density_r);
  e.e_total = e.e_h + e.e_r;
  return e;
}

double rho_l2(const MapField& u, const EmbeddedTarget& target) {
  const int dim = u.k();
  ScalarField sq(u.grid());
  Buf p{}, r{};
  for (std::size_t n = 0; n < u.points(); ++n) {
    u.point(n, first(p, dim));
    target.rho(first(p, dim), first(r, dim));
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += r[static_cast<std::size_t>(a)] * r[static_cast<std::size_t>(a)];
    sq[n] = s;
  }
  return integrate(sq);
}

DiagnosticsRecord make_record(const MapField& u, const Target& target, const TensionNorms& norms) {
  const Energies e = energies(u, target);
  DiagnosticsRecord r;
  r.e_h = e.e_h;
  r.e_r = e.e_r;
  r.e_total = e.e_total;
  r.tau_l2 = norms.l2;
  r.tau_sup = norms.sup;
  r.rho_l2 = target.mode() == Mode::Extrinsic ? rho_l2(u, target.embedded()) : 0.0;
  return r;
}

double consistency_scale(double h, double dt) { return h * h + dt; }

MonotonicityReport monotonicity_report(std::span<const DiagnosticsRecord> records, CurvatureSign curvature,
                                       const MonotonicityOptions& opts) {
  MonotonicityReport r;
  double max_increase = -std::numeric_limits<double>::infinity();
  double max_residual = 0.0;
  double min_second = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n + 1 < records.size(); ++n) {
    const auto& a = records[n];
    const auto& b = records[n + 1];
    const double dt = b.t - a.t;
    if (!(dt > 0.0)) continue;
    max_increase = std::max(max_increase, b.e_h - a.e_h);
    const double rate = (b.e_h - a.e_h) / dt;
    const double dissipation = 0.5 * (a.tau_l2 * a.tau_l2 + b.tau_l2 * b.tau_l2);
    max_residual = std::max(max_residual, std::abs(rate + dissipation));
    if (n >= 1) {
      const auto& prev = records[n - 1];
      const double dt0 = a.t - prev.t;
      if (dt0 > 0.0) {
        const double second = 2.0 * (rate - (a.e_h - prev.e_h) / dt0) / (dt + dt0);
        min_second = std::min(min_second, second);
      }
    }
  }
  if (!std::isfinite(max_increase)) max_increase = 0.0;
  if (!std::isfinite(min_second)) min_second = 0.0;
  r.max_increase = max_increase;
  r.max_identity_residual = max_residual;
  r.min_second_difference = min_second;
  r.nonincreasing = make_verdict("energy_nonincreasing", -max_increase, opts.monotone_tolerance);
  r.energy_identity = make_verdict("energy_identity", -max_residual, opts.identity_tolerance);
  r.convexity_checked = curvature == CurvatureSign::Zero || curvature == CurvatureSign::Negative;
  r.convexity = r.convexity_checked ? make_verdict("energy_convexity", min_second, opts.convexity_tolerance)
                                    : Verdict{"energy_convexity", 0.0, opts.convexity_tolerance, true};
  return r;
}

ReebReport reeb_bound_report(std::span<const DiagnosticsRecord> records, double t0, double tolerance) {
  auto it = std::find_if(records.begin(), records.end(),
                         [t0](const DiagnosticsRecord& r) { return r.t >= t0 - 1e-12; });
  if (it == records.end()) throw std::invalid_argument("no record at or after t0");
  ReebReport r;
  r.t0 = it->t;
  const double tau0 = 0.5 * it->tau_l2 * it->tau_l2;
  const double er0 = it->e_r;
  r.min_slack = std::numeric_limits<double>::infinity();
  for (auto jt = it + 1; jt != records.end(); ++jt) {
    const double bound = tau0 + er0 * std::exp(2.0 * (r.t0 - jt->t));
    r.min_slack = std::min(r.min_slack, bound - jt->e_r);
  }
  if (!std::isfinite(r.min_slack)) r.min_slack = 0.0;
  r.tail_slack = tau0 - records.back().e_r;
  r.bound = make_verdict("reeb_bound", r.min_slack, tolerance);
  r.tail = make_verdict("reeb_tail", r.tail_slack, tolerance);
  return r;
}

void annotate_records(std::vector<DiagnosticsRecord>& records, CurvatureSign curvature,
                      const AnnotationOptions& opts) {
  const bool convex = curvature == CurvatureSign::Zero || curvature == CurvatureSign::Negative;
  const auto& mo = opts.monotonicity;
  const auto t0 = std::find_if(records.begin(), records.end(),
                               [&](const DiagnosticsRecord& r) { return r.t >= opts.reeb_t0 - 1e-12; });
  const bool has_t0 = t0 != records.end();
  const double tau0 = has_t0 ? 0.5 * t0->tau_l2 * t0->tau_l2 : 0.0;
  const double er0 = has_t0 ? t0->e_r : 0.0;
  const double t0_time = has_t0 ? t0->t : 0.0;
  for (std::size_t n = 0; n < records.size(); ++n) {
    auto& r = records[n];
    double increase = 0.0, residual = 0.0, second = 0.0, reeb = 0.0;
    if (n >= 1) {
      const auto& a = records[n - 1];
      const double dt = r.t - a.t;
      increase = r.e_h - a.e_h;
      if (dt > 0.0) residual = std::abs((r.e_h - a.e_h) / dt + 0.5 * (a.tau_l2 * a.tau_l2 + r.tau_l2 * r.tau_l2));
      if (n >= 2 && convex && dt > 0.0) {
        const auto& b = records[n - 2];
        const double dt0 = a.t - b.t;
        if (dt0 > 0.0) second = 2.0 * ((r.e_h - a.e_h) / dt - (a.e_h - b.e_h) / dt0) / (dt + dt0);
      }
    }
    if (has_t0 && r.t > t0_time) reeb = tau0 + er0 * std::exp(2.0 * (t0_time - r.t)) - r.e_r;
    r.verdicts = {make_verdict("energy_nonincreasing", -increase, mo.monotone_tolerance),
                  make_verdict("energy_identity", -residual, mo.identity_tolerance),
                  make_verdict("energy_convexity", second,
                               mo.convexity_tolerance),
                  make_verdict("reeb_bound", reeb, opts.reeb_tolerance)};
  }
}

KernelProbeResult heat_kernel_probe(int grid_n, double fit_lo, double fit_hi) {
  const HorizontalLattice lat(grid_n);
  std::vector<double> u(lat.size(), 0.0), next(lat.size(), 0.0);
  u[lat.index(grid_n / 2, grid_n / 2, lat.nz() / 2)] = 1.0 / lat.cell_volume();
  const double dt = lat.heat_dt();
  const long last = static_cast<long>(std::ceil(fit_hi / dt - 1e-9));
  const long first_sample = std::max(1L, static_cast<long>(std::floor(4.0 * lat.h() * lat.h() / dt)));
  const auto samples = log_spaced_steps(first_sample, last, 40);

  KernelProbeResult r;
  r.fit_lo = fit_lo;
  r.fit_hi = fit_hi;
  r.min_value = std::numeric_limits<double>::infinity();
  std::size_t next_sample = 0;
  for (long step = 1; step <= last; ++step) {
    lat.heat_step(u, next);
    u.swap(next);
    if (next_sample < samples.size() && step == samples[next_sample]) {
      ++next_sample;
      r.times.push_back(step * dt);
      r.sups.push_back(*std::max_element(u.begin(), u.end()));
      r.min_value = std::min(r.min_value, *std::min_element(u.begin(), u.end()));
      r.max_mass_drift = std::max(r.max_mass_drift, std::abs(integrate(u, lat.cell_volume()) - 1.0));
    }
  }
  return fit_probe(std::move(r));
}

KernelProbeResult grid_heat_kernel_probe(int grid_n, double fit_lo, double fit_hi) {
  const Grid grid(grid_n);
  ScalarField u(grid);
  u.at(grid_n / 2, grid_n / 2, grid_n / 2) = 1.0 / grid.cell_volume();
  const double dt = dt_max(grid);
  const long last = static_cast<long>(std::ceil(fit_hi / dt - 1e-9));
  const long first_sample = std::max(1L, static_cast<long>(std::floor(4.0 * grid.h() * grid.h() / dt)));
  const auto samples = log_spaced_steps(first_sample, last, 40);

  KernelProbeResult r;
  r.fit_lo = fit_lo;
  r.fit_hi = fit_hi;
  r.min_value = std::numeric_limits<double>::infinity();
  std::size_t next_sample = 0;
  for (long step = 1; step <= last; ++step) {
    u = linear_heat_step(u, dt);
    if (next_sample < samples.size() && step == samples[next_sample]) {
      ++next_sample;
      r.times.push_back(step * dt);
      r.sups.push_back(*std::max_element(u.data().begin(), u.data().end()));
      r.min_value = std::min(r.min_value, *std::min_element(u.data().begin(), u.data().end()));
      r.max_mass_drift = std::max(r.max_mass_drift, std::abs(integrate(u) - 1.0));
    }
  }
  return fit_probe(std::move(r));
}

MaxPrincipleReport max_principle_probe(const ScalarField& u0, double t_end) {
  const double dt = dt_max(u0.grid());
  const double h = u0.grid().h();
  MaxPrincipleReport r;
  auto sup = [](const ScalarField& f) { return *std::max_element(f.data().begin(), f.data().end()); };
  r.initial_sup = sup(u0);
  ScalarField u = u0;
  const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  for (long s = 1; s <= steps; ++s) {
    u = linear_heat_step(u, dt);
    const double excess = sup(u) - r.initial_sup;
    r.max_excess = std::max(r.max_excess, excess);
    if (excess > 0.0) r.fitted_constant = std::max(r.fitted_constant, excess / (s * dt * h * h));
  }
  return r;
}

SmoothingReport smoothing_probe(int grid_n, double t_end, int samples) {
  const Grid grid(grid_n);
  ScalarField u(grid);
  u.at(grid_n / 2, grid_n / 2, grid_n / 2) = 1.0 / grid.cell_volume();
  const double dt = dt_max(grid);
  const long first = static_cast<long>(std::ceil(4.0 * grid.h() * grid.h() / dt));
  const long last = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  const auto sample_steps = log_spaced_steps(first, last, samples);
  SmoothingReport r;
  std::size_t next = 0;
  for (long s = 1; s <= last && next < sample_steps.size(); ++s) {
    u = linear_heat_step(u, dt);
    if (s == sample_steps[next]) {
      ++next;
      r.times.push_back(s * dt);
      r.ratios.push_back(l2_norm(sub_laplacian(u)) / l2_norm(u));
    }
  }
  int rises = 0;
  for (std::size_t n = 1; n < r.ratios.size(); ++n)
    if (r.ratios[n] > r.ratios[n - 1]) ++rises;
  r.nonmonotone_fraction = r.ratios.size() > 1 ? static_cast<double>(rises) / static_cast<double>(r.ratios.size() - 1) : 0.0;
  return r;
}

double map_distance(const MapField& u, const MapField& v, const Target& target) {
  if (u.k() != v.k() || !(u.grid() == v.grid())) throw std::invalid_argument("map_distance needs matching fields");
  const int dim = u.k();
  Buf p{}, q{}, pp{}, qq{};
  double d = 0.0;
  for (std::size_t n = 0; n < u.points(); ++n) {
    u.point(n, first(p, dim));
    v.point(n, first(q, dim));
    if (target.mode() == Mode::Extrinsic) {
      target.embedded().project(first(p, dim), first(pp, dim));
      target.embedded().project(first(q, dim), first(qq, dim));
      d = std::max(d, target.distance(first(pp, dim), first(qq, dim)));
    } else {
      d = std::max(d, target.distance(first(p, dim), first(q, dim)));
    }
  }
  return d;
}

WindingNumbers winding_numbers(const MapField& u) {
  if (u.k() != 4) throw std::invalid_argument("winding numbers need a map into the Clifford torus (K = 4)");
  const Grid& g = u.grid();
  const int n = g.n();
  ScalarField alpha[2] = {ScalarField(g), ScalarField(g)};
  for (std::size_t idx = 0; idx < u.points(); ++idx) {
    alpha[0][idx] = std::atan2(u[1][idx], u[0][idx]);
    alpha[1][idx] = std::atan2(u[3][idx], u[2][idx]);
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  WindingNumbers w;
  std::array<bool, 4> seen{};
  auto account = [&](int slot, double total) {
    const double turns = total / two_pi;
    const double rounded = std::round(turns);
    w.max_residual = std::max(w.max_residual, std::abs(turns - rounded));
    const int value = static_cast<int>(rounded);
    if (!seen[static_cast<std::size_t>(slot)]) {
      w.matrix[static_cast<std::size_t>(slot)] = value;
      seen[static_cast<std::size_t>(slot)] = true;
    } else if (w.matrix[static_cast<std::size_t>(slot)] != value) {
      w.consistent = false;
    }
  };
  for (int c = 0; c < 2; ++c) {
    const ScalarField& a = alpha[c];
    // x-cycle through (·, j, k)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += wrap_angle(a.get_wrapped(i + 1, j, k) - a.at(i, j, k));
        account(2 * c + 0, total);
      }
    // y-cycle through (i, ·, k), closed by the z-segment from k − i back to k
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        double total = 0.0;
        for (int j = 0; j < n; ++j) total += wrap_angle(a.get_wrapped(i, j + 1, k) - a.at(i, j, k));
        for (int m = 0; m < i; ++m) total += wrap_angle(a.get_wrapped(i, 0, k - i + m + 1) - a.get_wrapped(i, 0, k - i + m));
        account(2 * c + 1, total);
      }
  }
  if (w.max_residual >= 0.1) w.consistent = false;
  return w;
}

MapField geodesic_homotopy(const MapField& u, const MapField& v, const Target& target, double s) {
  const int dim = u.k();
  MapField out(u.grid(), dim);
  Buf p{}, q{}, o{};
  for (std::size_t n = 0; n < u.points(); ++n) {
    u.point(n, first(p, dim));
    v.point(n, first(q, dim));
    target.geodesic_interp(first(p, dim), first(q, dim), s, first(o, dim));
    out.set_point(n, first(o, dim));
  }
  return out;
}

HomotopyProfile geodesic_homotopy_suite(const MapField& u, const MapField& v, const Target& target, int subdivisions) {
  if (subdivisions < 1) throw std::invalid_argument("homotopy needs at least one subdivision");
  HomotopyProfile p;
  const bool torus = target.name() == "clifford";
  const WindingNumbers w0 = torus ? winding_numbers(u) : WindingNumbers{};
  for (int c = 0; c <= subdivisions; ++c) {
    const double s = static_cast<double>(c) / subdivisions;
    const MapField phi = c == 0 ? u : c == subdivisions ? v : geodesic_homotopy(u, v, target, s);
    const MapField tau = tension(phi, target);
    const TensionNorms norms = tension_norms(phi, tau, target);
    p.s.push_back(s);
    p.energy.push_back(energies(phi, target).e_h);
    p.tau_l2.push_back(norms.l2);
    p.tau_sup.push_back(norms.sup);
    p.max_energy_deviation = std::max(p.max_energy_deviation, std::abs(p.energy.back() - p.energy.front()));
    p.max_tau_l2 = std::max(p.max_tau_l2, norms.l2);
    p.max_tau_sup = std::max(p.max_tau_sup, norms.sup);
    if (torus && winding_numbers(phi).matrix != w0.matrix) p.winding_constant = false;
  }
  return p;
}

}  // namespace subrh
