#include "subrh/targets.hpp"

#include <algorithm>
#include <array>
#include <complex>
#include <sstream>

namespace subrh {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Closest-point projection onto the round sphere of radius R in ℝ^d, and its
// first and second derivatives. Used for S² and for each Clifford factor.
struct RadialBlock {
  double radius;

  void project(std::span<const double> a, std::span<double> out) const {
    const double r = norm(a);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = radius * a[i] / r;
  }

  void dP(std::span<const double> a, std::span<const double> v, std::span<double> out) const {
    const double r = norm(a);
    const double av = dot(a, v);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = radius * (v[i] / r - av * a[i] / (r * r * r));
  }

  void hess(std::span<const double> a, std::span<const double> u, std::span<const double> v,
            std::span<double> out) const {
    const double r = norm(a);
    const double r3 = r * r * r;
    const double au = dot(a, u), av = dot(a, v), uv = dot(u, v);
    for (std::size_t i = 0; i < a.size(); ++i)
      out[i] = radius * (-(au * v[i] + av * u[i] + uv * a[i]) / r3 + 3.0 * au * av * a[i] / (r3 * r * r));
  }
};

std::string format_point(std::span<const double> p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

}  // namespace

std::string to_string(CurvatureSign s) {
  switch (s) {
    case CurvatureSign::Negative: return "negative";
    case CurvatureSign::Zero: return "zero";
    case CurvatureSign::Positive: return "positive";
    case CurvatureSign::Mixed: return "mixed";
  }
  return "unknown";
}

std::string to_string(Mode m) { return m == Mode::Extrinsic ? "extrinsic" : "intrinsic"; }

double wrap_angle(double d) {
  constexpr double pi = std::numbers::pi;
  double r = std::remainder(d, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

void EmbeddedTarget::hessP_contract(std::span<const double> p, std::span<const double> u,
                                    std::span<const double> v, std::span<double> out) const {
  const double d = distance_to_target(p);
  if (!(d < tube_radius()))
    throw TubeViolation(name() + ": point " + format_point(p) + " at distance " + std::to_string(d) +
                            " is outside the tube",
                        d);
  hessP(p, u, v, out);
}

void EmbeddedTarget::rho(std::span<const double> p, std::span<double> out) const {
  std::array<double, kMaxTargetDim> proj{};
  project(p, std::span(proj).first(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] - proj[i];
}

void ChartTarget::christoffel_contract(std::span<const double> f, std::span<const double> u,
                                       std::span<const double> v, std::span<double> out) const {
  if (!in_guard(f)) throw GuardViolation(name() + ": " + guard_description(f), guard_measure(f));
  christoffel(f, u, v, out);
}

double ChartTarget::metric_pair(std::span<const double> f, std::span<const double> u,
                                std::span<const double> v) const {
  const int n = dim();
  std::array<double, kMaxTargetDim * kMaxTargetDim> h{};
  metric(f, std::span(h).first(static_cast<std::size_t>(n * n)));
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += h[static_cast<std::size_t>(i * n + j)] * u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
  return s;
}

// --- Sphere2 ---------------------------------------------------------------

double Sphere2::distance_to_target(std::span<const double> p) const { return std::abs(norm(p) - 1.0); }

void Sphere2::project(std::span<const double> p, std::span<double> out) const { RadialBlock{1.0}.project(p, out); }

void Sphere2::dP(std::span<const double> p, std::span<const double> v, std::span<double> out) const {
  RadialBlock{1.0}.dP(p, v, out);
}

void Sphere2::hessP(std::span<const double> p, std::span<const double> u, std::span<const double> v,
                    std::span<double> out) const {
  RadialBlock{1.0}.hess(p, u, v, out);
}

double Sphere2::distance(std::span<const double> p, std::span<const double> q) const {
  const double cx = p[1] * q[2] - p[2] * q[1];
  const double cy = p[2] * q[0] - p[0] * q[2];
  const double cz = p[0] * q[1] - p[1] * q[0];
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot(p, q));
}

void Sphere2::geodesic_interp(std::span<const double> p, std::span<const double> q, double s,
                              std::span<double> out) const {
  const double angle = distance(p, q);
  std::array<double, 3> w{};
  const double pq = dot(p, q);
  for (int i = 0; i < 3; ++i) w[static_cast<std::size_t>(i)] = q[static_cast<std::size_t>(i)] - pq * p[static_cast<std::size_t>(i)];
  double wn = norm(w);
  if (wn < 1e-12) {
    if (angle < 1.0) {
      for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)];
      return;
    }
    // antipodal: head through the reference axis
    std::array<double, 3> e{0.0, 0.0, 1.0};
    if (std::abs(p[2]) > 0.9) e = {1.0, 0.0, 0.0};
    const double ep = dot(e, p);
    for (int i = 0; i < 3; ++i) w[static_cast<std::size_t>(i)] = e[static_cast<std::size_t>(i)] - ep * p[static_cast<std::size_t>(i)];
    wn = norm(w);
  }
  const double c = std::cos(s * angle), sn = std::sin(s * angle);
  for (int i = 0; i < 3; ++i)
    out[static_cast<std::size_t>(i)] = c * p[static_cast<std::size_t>(i)] + sn * w[static_cast<std::size_t>(i)] / wn;
}

// --- CliffordTorus ---------------------------------------------------------

double CliffordTorus::distance_to_target(std::span<const double> p) const {
  const double da = norm(p.first(2)) - kRadius;
  const double db = norm(p.subspan(2, 2)) - kRadius;
  return std::sqrt(da * da + db * db);
}

void CliffordTorus::project(std::span<const double> p, std::span<double> out) const {
  const RadialBlock blk{kRadius};
  blk.project(p.first(2), out.first(2));
  blk.project(p.subspan(2, 2), out.subspan(2, 2));
}

void CliffordTorus::dP(std::span<const double> p, std::span<const double> v, std::span<double> out) const {
  const RadialBlock blk{kRadius};
  blk.dP(p.first(2), v.first(2), out.first(2));
  blk.dP(p.subspan(2, 2), v.subspan(2, 2), out.subspan(2, 2));
}

void CliffordTorus::hessP(std::span<const double> p, std::span<const double> u, std::span<const double> v,
                          std::span<double> out) const {
  const RadialBlock blk{kRadius};
  blk.hess(p.first(2), u.first(2), v.first(2), out.first(2));
  blk.hess(p.subspan(2, 2), u.subspan(2, 2), v.subspan(2, 2), out.subspan(2, 2));
}

std::pair<double, double> CliffordTorus::angles(std::span<const double> p) {
  return {std::atan2(p[1], p[0]), std::atan2(p[3], p[2])};
}

void CliffordTorus::from_angles(double a1, double a2, std::span<double> out) {
  out[0] = kRadius * std::cos(a1);
  out[1] = kRadius * std::sin(a1);
  out[2] = kRadius * std::cos(a2);
  out[3] = kRadius * std::sin(a2);
}

double CliffordTorus::distance(std::span<const double> p, std::span<const double> q) const {
  const auto [p1, p2] = angles(p);
  const auto [q1, q2] = angles(q);
  const double d1 = wrap_angle(q1 - p1), d2 = wrap_angle(q2 - p2);
  return kRadius * std::sqrt(d1 * d1 + d2 * d2);
}

void CliffordTorus::geodesic_interp(std::span<const double> p, std::span<const double> q, double s,
                                    std::span<double> out) const {
  const auto [p1, p2] = angles(p);
  const auto [q1, q2] = angles(q);
  from_angles(p1 + s * wrap_angle(q1 - p1), p2 + s * wrap_angle(q2 - p2), out);
}

// --- EuclideanTarget -------------------------------------------------------

EuclideanTarget::EuclideanTarget(int k) : k_(k) {
  if (k < 1 || k > kMaxTargetDim) throw std::invalid_argument("euclidean target dimension out of range");
}

void EuclideanTarget::project(std::span<const double> p, std::span<double> out) const {
  std::copy(p.begin(), p.end(), out.begin());
}

void EuclideanTarget::dP(std::span<const double>, std::span<const double> v, std::span<double> out) const {
  std::copy(v.begin(), v.end(), out.begin());
}

void EuclideanTarget::hessP(std::span<const double>, std::span<const double>, std::span<const double>,
                            std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

double EuclideanTarget::distance(std::span<const double> p, std::span<const double> q) const {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
  return std::sqrt(s);
}

void EuclideanTarget::geodesic_interp(std::span<const double> p, std::span<const double> q, double s,
                                      std::span<double> out) const {
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = (1.0 - s) * p[i] + s * q[i];
}

// --- PoincareDisk ----------------------------------------------------------

void PoincareDisk::metric(std::span<const double> f, std::span<double> out) const {
  const double w = 1.0 - f[0] * f[0] - f[1] * f[1];
  const double c = 4.0 / (w * w);
  out[0] = c;
  out[1] = 0.0;
  out[2] = 0.0;
  out[3] = c;
}

bool PoincareDisk::in_guard(std::span<const double> f) const { return std::hypot(f[0], f[1]) <= guard_; }

void PoincareDisk::christoffel(std::span<const double> f, std::span<const double> u, std::span<const double> v,
                               std::span<double> out) const {
  // Γ^k_ij u^i v^j = 2((f·v) u_k + (f·u) v_k − (u·v) f_k)/(1 − |f|²)
  const double w = 1.0 - f[0] * f[0] - f[1] * f[1];
  const double fu = f[0] * u[0] + f[1] * u[1];
  const double fv = f[0] * v[0] + f[1] * v[1];
  const double uv = u[0] * v[0] + u[1] * v[1];
  for (std::size_t k = 0; k < 2; ++k) out[k] = 2.0 * (fv * u[k] + fu * v[k] - uv * f[k]) / w;
}

std::string PoincareDisk::guard_description(std::span<const double> f) const {
  return "chart point " + format_point(f) + " has |f| = " + std::to_string(std::hypot(f[0], f[1])) +
         " beyond the guard " + std::to_string(guard_);
}

double PoincareDisk::guard_measure(std::span<const double> f) const { return std::hypot(f[0], f[1]); }

double PoincareDisk::distance(std::span<const double> p, std::span<const double> q) const {
  const std::complex<double> a(p[0], p[1]), b(q[0], q[1]);
  const double r = std::abs((b - a) / (1.0 - std::conj(a) * b));
  return 2.0 * std::atanh(r);
}

void PoincareDisk::geodesic_interp(std::span<const double> p, std::span<const double> q, double s,
                                   std::span<double> out) const {
  // Move p to the origin, follow the diameter, move back.
  const std::complex<double> a(p[0], p[1]), b(q[0], q[1]);
  const std::complex<double> w = (b - a) / (1.0 - std::conj(a) * b);
  const double r = std::abs(w);
  std::complex<double> z = a;
  if (r > 0.0) {
    const std::complex<double> zeta = std::tanh(s * std::atanh(r)) * (w / r);
    z = (zeta + a) / (1.0 + std::conj(a) * zeta);
  }
  out[0] = z.real();
  out[1] = z.imag();
}

// --- FlatTorusChart --------------------------------------------------------

void FlatTorusChart::metric(std::span<const double>, std::span<double> out) const {
  const double r2 = CliffordTorus::kRadius * CliffordTorus::kRadius;
  out[0] = r2;
  out[1] = 0.0;
  out[2] = 0.0;
  out[3] = r2;
}

bool FlatTorusChart::in_guard(std::span<const double> f) const {
  return std::isfinite(f[0]) && std::isfinite(f[1]);
}

void FlatTorusChart::christoffel(std::span<const double>, std::span<const double>, std::span<const double>,
                                 std::span<double> out) const {
  out[0] = 0.0;
  out[1] = 0.0;
}

std::string FlatTorusChart::guard_description(std::span<const double> f) const {
  return "non-finite angle chart point " + format_point(f);
}

double FlatTorusChart::guard_measure(std::span<const double> f) const { return std::hypot(f[0], f[1]); }

double FlatTorusChart::distance(std::span<const double> p, std::span<const double> q) const {
  const double d1 = wrap_angle(q[0] - p[0]), d2 = wrap_angle(q[1] - p[1]);
  return CliffordTorus::kRadius * std::sqrt(d1 * d1 + d2 * d2);
}

void FlatTorusChart::geodesic_interp(std::span<const double> p, std::span<const double> q, double s,
                                     std::span<double> out) const {
  out[0] = p[0] + s * wrap_angle(q[0] - p[0]);
  out[1] = p[1] + s * wrap_angle(q[1] - p[1]);
}

// --- Target ----------------------------------------------------------------

Target Target::embedded(std::shared_ptr<const EmbeddedTarget> t) {
  Target r;
  r.embedded_ = std::move(t);
  return r;
}

Target Target::chart(std::shared_ptr<const ChartTarget> t) {
  Target r;
  r.chart_ = std::move(t);
  return r;
}

const EmbeddedTarget& Target::embedded() const {
  if (!embedded_) throw std::logic_error("target " + name() + " is not embedded");
  return *embedded_;
}

const ChartTarget& Target::chart() const {
  if (!chart_) throw std::logic_error("target " + name() + " is not a chart target");
  return *chart_;
}

int Target::dim() const { return embedded_ ? embedded_->ambient_dim() : chart_->dim(); }
std::string Target::name() const { return embedded_ ? embedded_->name() : chart_->name(); }
CurvatureSign Target::curvature_sign() const {
  return embedded_ ? embedded_->curvature_sign() : chart_->curvature_sign();
}

double Target::distance(std::span<const double> p, std::span<const double> q) const {
  return embedded_ ? embedded_->distance(p, q) : chart_->distance(p, q);
}

void Target::geodesic_interp(std::span<const double> p, std::span<const double> q, double s,
                             std::span<double> out) const {
  if (embedded_)
    embedded_->geodesic_interp(p, q, s, out);
  else
    chart_->geodesic_interp(p, q, s, out);
}

Target make_target(const std::string& name, int euclidean_k) {
  if (name == "sphere2") return Target::embedded(std::make_shared<Sphere2>());
  if (name == "clifford") return Target::embedded(std::make_shared<CliffordTorus>());
  if (name == "euclidean") return Target::embedded(std::make_shared<EuclideanTarget>(euclidean_k));
  if (name == "poincare") return Target::chart(std::make_shared<PoincareDisk>());
  if (name == "flat_torus") return Target::chart(std::make_shared<FlatTorusChart>());
  throw std::invalid_argument("unknown target '" + name + "'");
}

}  // namespace subrh
