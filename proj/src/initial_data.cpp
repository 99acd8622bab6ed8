#include "subrh/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace subrh {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Platform-independent uniform draws from mt19937_64.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()(double lo, double hi) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 rng_;
};

struct TrigMode {
  int p, q;
  double a, b;
};

struct ThetaMode {
  double re, im;      // complex coefficient γ
  double c;           // centre of ψ
  double alpha0, alpha1;
};

// Σ_m e^{2πi(z + m x)} ψ(y + m − c), ψ(s) = (α₀ + α₁ s) e^{−π s²}; returns γ·Θ real part.
double theta_mode_value(const ThetaMode& t, double x, double y, double z) {
  double re = 0.0, im = 0.0;
  for (int m = -8; m <= 8; ++m) {
    const double s = y + m - t.c;
    const double psi = (t.alpha0 + t.alpha1 * s) * std::exp(-std::numbers::pi * s * s);
    const double phase = kTwoPi * (z + m * x);
    re += psi * std::cos(phase);
    im += psi * std::sin(phase);
  }
  return t.re * re - t.im * im;
}

}  // namespace

double theta_ground_state(double x, double y, double z) {
  return theta_mode_value(ThetaMode{1.0, 0.0, 0.0, 1.0, 0.0}, x, y, z);
}

double theta_ground_state_imag(double x, double y, double z) {
  return theta_mode_value(ThetaMode{0.0, -1.0, 0.0, 1.0, 0.0}, x, y, z);
}

ScalarField sample(const Grid& grid, double (*fn)(double, double, double)) {
  ScalarField f(grid);
  const int n = grid.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) f.at(i, j, k) = fn(grid.x(i), grid.y(j), grid.z(k));
  return f;
}

ScalarField random_smooth_scalar(const Grid& grid, std::uint64_t seed, const SmoothFieldOptions& opts) {
  Uniform draw(seed);
  std::vector<TrigMode> modes;
  double bound = 0.0;
  for (int p = -opts.max_mode; p <= opts.max_mode; ++p)
    for (int q = 0; q <= opts.max_mode; ++q) {
      if (q == 0 && p <= 0) continue;  // (p, q) and (−p, −q) give the same mode
      const double w = 1.0 / (1.0 + p * p + q * q);
      TrigMode m{p, q, w * draw(-1.0, 1.0), w * draw(-1.0, 1.0)};
      bound += std::abs(m.a) + std::abs(m.b);
      modes.push_back(m);
    }

  std::vector<ThetaMode> thetas;
  double theta_bound = 0.0;
  if (opts.z_dependent) {
    for (int r = 0; r < 2; ++r) {
      ThetaMode t{draw(-1.0, 1.0), draw(-1.0, 1.0), draw(0.0, 1.0), draw(0.5, 1.0), draw(-0.5, 0.5)};
      // Σ_m e^{−π(s+m)²} ≤ 1.09 and Σ_m |s+m| e^{−π(s+m)²} ≤ 0.6 for every s.
      theta_bound += std::hypot(t.re, t.im) * (1.09 * std::abs(t.alpha0) + 0.6 * std::abs(t.alpha1));
      thetas.push_back(t);
    }
  }

  const double scale_trig = opts.amplitude / (opts.z_dependent ? 2.0 * bound : bound);
  const double scale_theta = opts.z_dependent ? opts.amplitude / (2.0 * theta_bound) : 0.0;

  ScalarField f(grid);
  const int n = grid.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = grid.x(i), y = grid.y(j);
      double planar = 0.0;
      for (const auto& m : modes) {
        const double ph = kTwoPi * (m.p * x + m.q * y);
        planar += m.a * std::cos(ph) + m.b * std::sin(ph);
      }
      for (int k = 0; k < n; ++k) {
        double v = scale_trig * planar;
        for (const auto& t : thetas) v += scale_theta * theta_mode_value(t, x, y, grid.z(k));
        f.at(i, j, k) = v;
      }
    }
  return f;
}

MapField standard_torus_map(const Grid& grid, double shift1, double shift2) {
  MapField u(grid, 4);
  const int n = grid.n();
  std::array<double, 4> p{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CliffordTorus::from_angles(kTwoPi * grid.x(i) + shift1, kTwoPi * grid.y(j) + shift2, p);
      for (int k = 0; k < n; ++k) u.set_point(grid.index(i, j, k), p);
    }
  return u;
}

MapField constant_map(const Grid& grid, std::span<const double> value) {
  MapField u(grid, static_cast<int>(value.size()));
  for (std::size_t n = 0; n < grid.size(); ++n) u.set_point(n, value);
  return u;
}

MapField initial_map(const Target& target, const Grid& grid, std::uint64_t seed, const InitialDataOptions& opts) {
  const int dim = target.dim();
  std::vector<ScalarField> g;
  for (int a = 0; a < dim; ++a)
    g.push_back(random_smooth_scalar(grid, seed * 1000003ULL + static_cast<std::uint64_t>(a),
                                     SmoothFieldOptions{opts.max_mode, opts.z_dependent, 1.0}));
  const std::string name = target.name();
  MapField u(grid, dim);
  std::array<double, kMaxTargetDim> p{}, q{};
  const auto pt = std::span(p).first(static_cast<std::size_t>(dim));
  const auto qt = std::span(q).first(static_cast<std::size_t>(dim));
  const int n = grid.n();

  if (target.mode() == Mode::Intrinsic) {
    if (name == "flat_torus" && opts.winding != std::array<int, 4>{0, 0, 0, 0})
      throw std::invalid_argument("angle chart data must have zero winding");
    if (name == "poincare" && opts.amplitude * std::sqrt(2.0) > dynamic_cast<const PoincareDisk&>(target.chart()).guard())
      throw std::invalid_argument("poincare initial amplitude exceeds the chart guard");
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const std::size_t idx = grid.index(i, j, k);
        if (name == "clifford" || name == "flat_torus") {
          const double x = grid.x(i), y = grid.y(j);
          const double a1 = kTwoPi * (opts.winding[0] * x + opts.winding[1] * y) + opts.amplitude * g[0][idx];
          const double a2 = kTwoPi * (opts.winding[2] * x + opts.winding[3] * y) + opts.amplitude * g[1][idx];
          if (name == "clifford") {
            CliffordTorus::from_angles(a1, a2, pt);
          } else {
            p[0] = a1;
            p[1] = a2;
          }
        } else if (name == "sphere2") {
          q = {};
          q[0] = opts.amplitude * g[0][idx];
          q[1] = opts.amplitude * g[1][idx];
          q[2] = 1.0 + opts.amplitude * g[2][idx];
          target.embedded().project(qt, pt);
        } else {
          for (int a = 0; a < dim; ++a) p[static_cast<std::size_t>(a)] = opts.amplitude * g[static_cast<std::size_t>(a)][idx];
        }
        u.set_point(idx, pt);
      }

  if (opts.radial_offset != 0.0 && target.mode() == Mode::Extrinsic) {
    // Push each point off N along ρ-directions by a smooth relative amount.
    const ScalarField bump = random_smooth_scalar(grid, seed ^ 0x9e3779b97f4a7c15ULL, SmoothFieldOptions{2, opts.z_dependent, 1.0});
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      u.point(idx, pt);
      const double s = 1.0 + opts.radial_offset * (0.5 + 0.5 * bump[idx]);
      if (name == "clifford") {
        // scale the two factors oppositely so both radii move
        for (int a = 0; a < 2; ++a) p[static_cast<std::size_t>(a)] *= s;
        for (int a = 2; a < 4; ++a) p[static_cast<std::size_t>(a)] /= s;
      } else {
        for (int a = 0; a < dim; ++a) p[static_cast<std::size_t>(a)] *= s;
      }
      u.set_point(idx, pt);
    }
  }
  return u;
}

}  // namespace subrh
