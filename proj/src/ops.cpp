#include "subrh/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace subrh {

namespace {

// Neighbor rows of grid column (i, j), each resolved to a contiguous array
// indexed by k. Rows across the y boundary are copied with the twist shift.
class ColumnStencil {
 public:
  explicit ColumnStencil(const Grid& grid)
      : n_(grid.n()), kp_(static_cast<std::size_t>(n_)), km_(static_cast<std::size_t>(n_)),
        yp_buf_(static_cast<std::size_t>(n_)), ym_buf_(static_cast<std::size_t>(n_)) {
    for (int k = 0; k < n_; ++k) {
      kp_[static_cast<std::size_t>(k)] = (k + 1) % n_;
      km_[static_cast<std::size_t>(k)] = (k + n_ - 1) % n_;
    }
  }

  void load(const ScalarField& f, int i, int j) {
    const Grid& g = f.grid();
    const double* base = f.data().data();
    c = base + g.index(i, j, 0);
    xp = base + g.index((i + 1) % n_, j, 0);
    xm = base + g.index((i + n_ - 1) % n_, j, 0);
    if (j + 1 < n_) {
      yp = base + g.index(i, j + 1, 0);
    } else {
      // f(i, N, k) = f(i, 0, k − i)
      const double* row = base + g.index(i, 0, 0);
      for (int k = 0; k < n_; ++k) yp_buf_[static_cast<std::size_t>(k)] = row[((k - i) % n_ + n_) % n_];
      yp = yp_buf_.data();
    }
    if (j > 0) {
      ym = base + g.index(i, j - 1, 0);
    } else {
      // f(i, −1, k) = f(i, N−1, k + i)
      const double* row = base + g.index(i, n_ - 1, 0);
      for (int k = 0; k < n_; ++k) ym_buf_[static_cast<std::size_t>(k)] = row[(k + i) % n_];
      ym = ym_buf_.data();
    }
  }

  int kp(int k) const { return kp_[static_cast<std::size_t>(k)]; }
  int km(int k) const { return km_[static_cast<std::size_t>(k)]; }

  const double* c = nullptr;
  const double* xp = nullptr;
  const double* xm = nullptr;
  const double* yp = nullptr;
  const double* ym = nullptr;

 private:
  int n_;
  std::vector<int> kp_, km_;
  std::vector<double> yp_buf_, ym_buf_;
};

template <typename Kernel>
ScalarField apply_stencil(const ScalarField& f, Kernel kernel) {
  const Grid& g = f.grid();
  const int n = g.n();
  ScalarField out(g);
  double* dst = out.data().data();
  ColumnStencil s(g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      s.load(f, i, j);
      double* o = dst + g.index(i, j, 0);
      const double y = g.y(j);
      for (int k = 0; k < n; ++k) o[k] = kernel(s, k, y);
    }
  return out;
}

// Neumaier-compensated sum of a contiguous block.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

constexpr std::size_t kLeafSize = 256;

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= kLeafSize) {
    CompensatedSum s;
    for (double x : v) s.add(x);
    return s.value();
  }
  const std::size_t half = v.size() / 2;
  CompensatedSum s;
  s.add(pairwise_sum(v.first(half)));
  s.add(pairwise_sum(v.subspan(half)));
  return s.value();
}

}  // namespace

ScalarField apply_X(const ScalarField& f) {
  const double inv2h = 0.5 / f.grid().h();
  return apply_stencil(f, [inv2h](const ColumnStencil& s, int k, double y) {
    return (s.xp[k] - s.xm[k]) * inv2h + y * (s.c[s.kp(k)] - s.c[s.km(k)]) * inv2h;
  });
}

ScalarField apply_Y(const ScalarField& f) {
  const double inv2h = 0.5 / f.grid().h();
  return apply_stencil(f, [inv2h](const ColumnStencil& s, int k, double) { return (s.yp[k] - s.ym[k]) * inv2h; });
}

ScalarField apply_T(const ScalarField& f) {
  const double inv2h = 0.5 / f.grid().h();
  return apply_stencil(f, [inv2h](const ColumnStencil& s, int k, double) {
    return (s.c[s.kp(k)] - s.c[s.km(k)]) * inv2h;
  });
}

ScalarField sub_laplacian(const ScalarField& f) {
  const double h = f.grid().h();
  const double invh2 = 1.0 / (h * h);
  return apply_stencil(f, [invh2](const ColumnStencil& s, int k, double y) {
    const int kp = s.kp(k);
    const int km = s.km(k);
    const double c2 = 2.0 * s.c[k];
    const double fxx = s.xp[k] + s.xm[k] - c2;
    const double fyy = s.yp[k] + s.ym[k] - c2;
    const double fzz = s.c[kp] + s.c[km] - c2;
    const double fxz = 0.25 * (s.xp[kp] - s.xp[km] - s.xm[kp] + s.xm[km]);
    return (fxx + fyy + y * y * fzz + 2.0 * y * fxz) * invh2;
  });
}

ScalarField horizontal_energy_density(const ScalarField& f) {
  const double h = f.grid().h();
  const double invh2 = 1.0 / (h * h);
  return apply_stencil(f, [invh2](const ColumnStencil& s, int k, double y) {
    const int kp = s.kp(k);
    const double dx = s.xp[k] - s.c[k];
    const double dy = s.yp[k] - s.c[k];
    const double dz = s.c[kp] - s.c[k];
    const double cx = 0.5 * (s.xp[k] - s.xm[k]);
    const double cz = 0.5 * (s.c[kp] - s.c[s.km(k)]);
    return (0.5 * (dx * dx + dy * dy + y * y * dz * dz) + y * cx * cz) * invh2;
  });
}

HorizontalGradient horizontal_gradient(const MapField& u) {
  HorizontalGradient g{MapField(u.grid(), u.k()), MapField(u.grid(), u.k())};
  for (int a = 0; a < u.k(); ++a) {
    g.x[a] = apply_X(u[a]);
    g.y[a] = apply_Y(u[a]);
  }
  return g;
}

MapField sub_laplacian(const MapField& u) {
  MapField r(u.grid(), u.k());
  for (int a = 0; a < u.k(); ++a) r[a] = sub_laplacian(u[a]);
  return r;
}

MapField apply_T(const MapField& u) {
  MapField r(u.grid(), u.k());
  for (int a = 0; a < u.k(); ++a) r[a] = apply_T(u[a]);
  return r;
}

double integrate(std::span<const double> values, double cell_volume) {
  return cell_volume * pairwise_sum(values);
}

double integrate(const ScalarField& f) { return integrate(f.data(), f.grid().cell_volume()); }

double inner(const ScalarField& f, const ScalarField& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("inner product of fields on different grids");
  std::vector<double> prod(f.size());
  for (std::size_t n = 0; n < prod.size(); ++n) prod[n] = f[n] * g[n];
  return integrate(prod, f.grid().cell_volume());
}

double l2_norm(const ScalarField& f) { return std::sqrt(std::max(0.0, inner(f, f))); }

double sup_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

double dt_max(const Grid& grid) { return grid.h() * grid.h() / 10.0; }

ScalarField linear_heat_step(const ScalarField& f, double dt) {
  const double limit = dt_max(f.grid());
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12))
    throw StabilityError("heat step dt=" + std::to_string(dt) + " outside (0, " + std::to_string(limit) + "]");
  ScalarField r = sub_laplacian(f);
  r *= dt;
  r += f;
  return r;
}

std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit needs at least two pairs");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

double richardson_order(std::span<const double> h, std::span<const double> error) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < h.size(); ++i) {
    lx.push_back(std::log(h[i]));
    ly.push_back(std::log(error[i]));
  }
  return linear_fit(lx, ly).first;
}

}  // namespace subrh
