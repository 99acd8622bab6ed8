#include "subrh/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "subrh/diagnostics.hpp"
#include "subrh/ops.hpp"

namespace subrh {

namespace {

using Buf = std::array<double, kMaxTargetDim>;

std::span<double> first(Buf& b, int n) { return std::span(b).first(static_cast<std::size_t>(n)); }

std::string describe_point(const Grid& g, std::size_t idx) {
  const int n = g.n();
  const auto k = static_cast<int>(idx % static_cast<std::size_t>(n));
  const auto j = static_cast<int>((idx / static_cast<std::size_t>(n)) % static_cast<std::size_t>(n));
  const auto i = static_cast<int>(idx / (static_cast<std::size_t>(n) * static_cast<std::size_t>(n)));
  std::ostringstream os;
  os << "grid point (" << i << ", " << j << ", " << k << ")";
  return os.str();
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Conjugate gradients for (I − dt Δ_H) x = b.
ScalarField solve_shifted(const ScalarField& b, const ScalarField& guess, double dt, const StepOptions& opts) {
  auto apply = [dt](const ScalarField& v) {
    ScalarField r = sub_laplacian(v);
    r *= -dt;
    r += v;
    return r;
  };
  auto dot_all = [](const ScalarField& a, const ScalarField& c) {
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * c[n];
    return s;
  };
  ScalarField x = guess;
  ScalarField r = b - apply(x);
  ScalarField p = r;
  const double bnorm = std::sqrt(dot_all(b, b));
  const double target = opts.imex_tolerance * (bnorm > 0.0 ? bnorm : 1.0);
  double rr = dot_all(r, r);
  for (int it = 0; it < opts.imex_max_iterations; ++it) {
    if (std::sqrt(rr) <= target) return x;
    const ScalarField ap = apply(p);
    const double alpha = rr / dot_all(p, ap);
    x.axpy(alpha, p);
    r.axpy(-alpha, ap);
    const double rr_new = dot_all(r, r);
    p *= rr_new / rr;
    p += r;
    rr = rr_new;
  }
  if (std::sqrt(rr) <= target) return x;
  throw SolverError("conjugate gradients did not reach relative residual " + std::to_string(opts.imex_tolerance) +
                    " in " + std::to_string(opts.imex_max_iterations) + " iterations");
}

// F^a = P^a_bc(u)(Xu^b Xu^c + Yu^b Yu^c) (extrinsic) or −Γ^i_jk(...) (intrinsic),
// so that τ = Δ_H u − F.
MapField nonlinear_term(const MapField& u, const HorizontalGradient& grad, const Target& target) {
  const int dim = u.k();
  MapField f(u.grid(), dim);
  Buf p{}, gx{}, gy{}, ox{}, oy{};
  for (std::size_t n = 0; n < u.points(); ++n) {
    u.point(n, first(p, dim));
    grad.x.point(n, first(gx, dim));
    grad.y.point(n, first(gy, dim));
    if (target.mode() == Mode::Extrinsic) {
      const auto& t = target.embedded();
      t.hessP_contract(first(p, dim), first(gx, dim), first(gx, dim), first(ox, dim));
      t.hessP_contract(first(p, dim), first(gy, dim), first(gy, dim), first(oy, dim));
      for (int a = 0; a < dim; ++a) f[a][n] = ox[static_cast<std::size_t>(a)] + oy[static_cast<std::size_t>(a)];
    } else {
      const auto& t = target.chart();
      t.christoffel_contract(first(p, dim), first(gx, dim), first(gx, dim), first(ox, dim));
      t.christoffel_contract(first(p, dim), first(gy, dim), first(gy, dim), first(oy, dim));
      for (int a = 0; a < dim; ++a) f[a][n] = -(ox[static_cast<std::size_t>(a)] + oy[static_cast<std::size_t>(a)]);
    }
  }
  return f;
}

FlowState finish_step(const FlowState& s, MapField next, double dt, const StepOptions& opts) {
  FlowState out{std::move(next), s.target, s.t + dt, s.step + 1};
  if (out.mode() == Mode::Extrinsic && opts.reproject_every > 0 && out.step % opts.reproject_every == 0)
    reproject(out.u, out.target.embedded());
  check_state(out.u, out.target);
  return out;
}

FlowState advance_explicit(const FlowState& s, const MapField& tau, double dt, const StepOptions& opts) {
  const double limit = dt_max(s.u.grid());
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12))
    throw StabilityError("explicit step dt=" + std::to_string(dt) + " exceeds the stability bound " +
                         std::to_string(limit));
  MapField next = s.u;
  next.axpy(dt, tau);
  return finish_step(s, std::move(next), dt, opts);
}

}  // namespace

MapField tension(const MapField& u, const Target& target) {
  if (u.k() != target.dim()) throw std::invalid_argument("map dimension does not match target " + target.name());
  const HorizontalGradient grad = horizontal_gradient(u);
  MapField tau = sub_laplacian(u);
  tau.axpy(-1.0, nonlinear_term(u, grad, target));
  return tau;
}

MapField tangential_tension(const MapField& u, const MapField& tau, const Target& target) {
  if (target.mode() == Mode::Intrinsic) return tau;
  const auto& t = target.embedded();
  const int dim = u.k();
  MapField out(u.grid(), dim);
  Buf p{}, v{}, o{};
  for (std::size_t n = 0; n < u.points(); ++n) {
    u.point(n, first(p, dim));
    tau.point(n, first(v, dim));
    t.dP(first(p, dim), first(v, dim), first(o, dim));
    out.set_point(n, first(o, dim));
  }
  return out;
}

TensionNorms tension_norms(const MapField& u, const MapField& tau, const Target& target) {
  const int dim = u.k();
  ScalarField sq(u.grid());
  Buf p{}, v{}, o{};
  for (std::size_t n = 0; n < u.points(); ++n) {
    u.point(n, first(p, dim));
    tau.point(n, first(v, dim));
    if (target.mode() == Mode::Extrinsic) {
      target.embedded().dP(first(p, dim), first(v, dim), first(o, dim));
      sq[n] = dot(first(o, dim), first(o, dim));
    } else {
      sq[n] = target.chart().metric_pair(first(p, dim), first(v, dim), first(v, dim));
    }
  }
  TensionNorms r;
  r.l2 = std::sqrt(std::max(0.0, integrate(sq)));
  for (std::size_t n = 0; n < sq.size(); ++n) r.sup = std::max(r.sup, std::sqrt(std::max(0.0, sq[n])));
  return r;
}

void check_state(const MapField& u, const Target& target) {
  const int dim = u.k();
  Buf p{};
  if (!u.all_finite()) throw std::runtime_error("map field contains non-finite values");
  if (target.mode() == Mode::Extrinsic) {
    const auto& t = target.embedded();
    double worst = -1.0;
    std::size_t worst_idx = 0;
    for (std::size_t n = 0; n < u.points(); ++n) {
      u.point(n, first(p, dim));
      const double d = t.distance_to_target(first(p, dim));
      if (d > worst) {
        worst = d;
        worst_idx = n;
      }
    }
    if (!(worst < t.tube_radius()))
      throw TubeViolation(t.name() + ": left the tube at " + describe_point(u.grid(), worst_idx) +
                              ", distance " + std::to_string(worst),
                          worst);
  } else {
    const auto& t = target.chart();
    for (std::size_t n = 0; n < u.points(); ++n) {
      u.point(n, first(p, dim));
      if (!t.in_guard(first(p, dim)))
        throw GuardViolation(t.name() + ": left the chart guard at " + describe_point(u.grid(), n),
                             std::hypot(p[0], p[1]));
    }
  }
}

void reproject(MapField& u, const EmbeddedTarget& target) {
  const int dim = u.k();
  Buf p{}, q{};
  for (std::size_t n = 0; n < u.points(); ++n) {
    u.point(n, first(p, dim));
    target.project(first(p, dim), first(q, dim));
    u.set_point(n, first(q, dim));
  }
}

FlowState step_explicit(const FlowState& s, double dt, const StepOptions& opts) {
  check_state(s.u, s.target);
  return advance_explicit(s, tension(s.u, s.target), dt, opts);
}

FlowState step_imex(const FlowState& s, double dt, const StepOptions& opts) {
  if (!(dt > 0.0)) throw StabilityError("implicit step needs dt > 0");
  check_state(s.u, s.target);
  const HorizontalGradient grad = horizontal_gradient(s.u);
  const MapField f = nonlinear_term(s.u, grad, s.target);
  MapField next(s.u.grid(), s.u.k());
  for (int a = 0; a < s.u.k(); ++a) {
    ScalarField rhs = s.u[a];
    rhs.axpy(-dt, f[a]);
    next[a] = solve_shifted(rhs, s.u[a], dt, opts);
  }
  return finish_step(s, std::move(next), dt, opts);
}

std::string to_string(Integrator i) { return i == Integrator::Explicit ? "explicit" : "imex"; }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::TensionL2: return "tau_l2";
    case Termination::TensionSup: return "tau_sup";
    case Termination::TimeLimit: return "t_max";
    case Termination::Plateau: return "plateau";
    case Termination::Aborted: return "aborted";
  }
  return "unknown";
}

FlowResult run_flow(FlowState s, const StopCriteria& stop, const FlowOptions& opts) {
  if (!(stop.tau_tol_l2 > 0.0 && stop.tau_tol_sup > 0.0 && stop.t_max > 0.0 && stop.plateau_window > 0))
    throw std::invalid_argument("stop criteria must be positive");
  if (opts.record_every < 1) throw std::invalid_argument("record_every must be at least 1");
  if (!(opts.dt > 0.0)) throw std::invalid_argument("flow dt must be positive");

  FlowResult result{s, {}, Termination::TimeLimit, {}};
  double plateau_energy = std::numeric_limits<double>::quiet_NaN();
  long recorded_step = -1;
  try {
    check_state(s.u, s.target);
    for (;;) {
      const MapField tau = tension(s.u, s.target);
      const TensionNorms norms = tension_norms(s.u, tau, s.target);

      std::optional<Termination> reason;
      if (norms.l2 <= stop.tau_tol_l2)
        reason = Termination::TensionL2;
      else if (norms.sup <= stop.tau_tol_sup)
        reason = Termination::TensionSup;
      else if (s.t >= stop.t_max * (1.0 - 1e-12))
        reason = Termination::TimeLimit;

      const bool window_edge = s.step % stop.plateau_window == 0;
      if ((s.step % opts.record_every == 0 || reason || window_edge) && recorded_step != s.step) {
        DiagnosticsRecord rec = make_record(s.u, s.target, norms);
        rec.step = s.step;
        rec.t = s.t;
        if (window_edge) {
          if (!reason && std::isfinite(plateau_energy) && std::abs(rec.e_h - plateau_energy) < 1e-12)
            reason = Termination::Plateau;
          plateau_energy = rec.e_h;
        }
        if (s.step % opts.record_every == 0 || reason) {
          result.records.push_back(std::move(rec));
          recorded_step = s.step;
        }
      }
      if (reason) {
        result.termination = *reason;
        break;
      }

      const double dt = std::min(opts.dt, stop.t_max - s.t);
      if (opts.integrator == Integrator::Explicit)
        s = advance_explicit(s, tau, dt, opts.step);
      else
        s = step_imex(s, dt, opts.step);
    }
  } catch (const std::exception& e) {
    result.termination = Termination::Aborted;
    result.error = e.what();
  }
  result.state = std::move(s);
  return result;
}

PicardResult duhamel_picard(const MapField& phi, const EmbeddedTarget& target, double t_horizon, int k_max,
                            double dt) {
  if (k_max < 3) throw std::invalid_argument("duhamel_picard needs k_max >= 3");
  if (!(t_horizon > 0.0)) throw std::invalid_argument("t_horizon must be positive");
  const Grid& grid = phi.grid();
  const double limit = dt_max(grid);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) throw StabilityError("picard sub-step exceeds the stability bound");

  PicardResult res;
  res.substeps = static_cast<long>(std::ceil(t_horizon / dt - 1e-9));
  res.dt = t_horizon / static_cast<double>(res.substeps);
  const int dim = phi.k();
  const Target tgt = Target::embedded(std::shared_ptr<const EmbeddedTarget>(&target, [](const EmbeddedTarget*) {}));

  auto heat = [&](const MapField& v) {
    MapField r(grid, dim);
    for (int a = 0; a < dim; ++a) r[a] = linear_heat_step(v[a], res.dt);
    return r;
  };

  // Pointwise sup of |d| and |∇_H d| over one time slice.
  auto slice_difference = [&](const MapField& a, const MapField& b) {
    const MapField d = a - b;
    const HorizontalGradient g = horizontal_gradient(d);
    double sup_v = 0.0, sup_g = 0.0;
    for (std::size_t n = 0; n < d.points(); ++n) {
      double v2 = 0.0, g2 = 0.0;
      for (int c = 0; c < dim; ++c) {
        v2 += d[c][n] * d[c][n];
        g2 += g.x[c][n] * g.x[c][n] + g.y[c][n] * g.y[c][n];
      }
      sup_v = std::max(sup_v, std::sqrt(v2));
      sup_g = std::max(sup_g, std::sqrt(g2));
    }
    return std::pair{sup_v, sup_g};
  };

  std::vector<MapField> prev;
  prev.reserve(static_cast<std::size_t>(res.substeps) + 1);
  prev.push_back(phi);
  for (long n = 0; n < res.substeps; ++n) prev.push_back(heat(prev.back()));
  res.iterates.push_back(prev.back());

  int rising = 0;
  for (int k = 1; k <= k_max; ++k) {
    std::vector<MapField> cur;
    cur.reserve(prev.size());
    cur.push_back(phi);
    double xk = 0.0;
    try {
      for (long n = 0; n < res.substeps; ++n) {
        const MapField& src = prev[static_cast<std::size_t>(n)];
        MapField w = cur.back();
        w.axpy(-res.dt, nonlinear_term(src, horizontal_gradient(src), tgt));
        cur.push_back(heat(w));
      }
    } catch (const TubeViolation&) {
      res.diverged = true;
      break;
    }
    for (std::size_t n = 0; n < cur.size(); ++n) {
      const auto [sv, sg] = slice_difference(cur[n], prev[n]);
      xk = std::max(xk, sv + sg);
    }
    res.differences.push_back(xk);
    if (res.differences.size() >= 2) {
      const double prev_x = res.differences[res.differences.size() - 2];
      const double ratio = prev_x > 0.0 ? xk / prev_x : 0.0;
      res.ratios.push_back(ratio);
      rising = ratio >= 1.0 ? rising + 1 : 0;
      if (rising >= 2) res.diverged = true;
    }
    res.iterates.push_back(cur.back());
    if (res.diverged) break;
    prev = std::move(cur);
  }
  return res;
}

}  // namespace subrh
