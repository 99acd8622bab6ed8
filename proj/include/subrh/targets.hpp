#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

namespace subrh {

inline constexpr int kMaxTargetDim = 8;

enum class CurvatureSign { Negative, Zero, Positive, Mixed };
std::string to_string(CurvatureSign s);

enum class Mode { Extrinsic, Intrinsic };
std::string to_string(Mode m);

/// Raised when an ambient point leaves the tubular neighborhood B(N).
class TubeViolation : public std::runtime_error {
 public:
  TubeViolation(const std::string& what, double distance) : std::runtime_error(what), distance_(distance) {}
  double distance() const { return distance_; }

 private:
  double distance_;
};

/// Raised when a chart point leaves the admissible chart region.
class GuardViolation : public std::runtime_error {
 public:
  GuardViolation(const std::string& what, double radius) : std::runtime_error(what), radius_(radius) {}
  double radius() const { return radius_; }

 private:
  double radius_;
};

/// Target N ⊂ ℝ^K described by its closest-point projection P on B(N).
class EmbeddedTarget {
 public:
  virtual ~EmbeddedTarget() = default;

  virtual std::string name() const = 0;
  virtual int ambient_dim() const = 0;
  virtual double tube_radius() const = 0;
  virtual CurvatureSign curvature_sign() const = 0;

  /// |ρ(p)| = |p − P(p)|.
  virtual double distance_to_target(std::span<const double> p) const = 0;
  virtual void project(std::span<const double> p, std::span<double> out) const = 0;
  /// P^a_b(p) v^b.
  virtual void dP(std::span<const double> p, std::span<const double> v, std::span<double> out) const = 0;

  bool in_tube(std::span<const double> p) const { return distance_to_target(p) < tube_radius(); }

  /// P^a_{bc}(p) u^b v^c; symmetric in (u, v). Throws TubeViolation outside B(N).
  void hessP_contract(std::span<const double> p, std::span<const double> u, std::span<const double> v,
                      std::span<double> out) const;

  /// ρ(p) = p − P(p).
  void rho(std::span<const double> p, std::span<double> out) const;

  /// Geodesic distance between points of N.
  virtual double distance(std::span<const double> p, std::span<const double> q) const = 0;
  /// Constant-speed geodesic from p (s = 0) to q (s = 1).
  virtual void geodesic_interp(std::span<const double> p, std::span<const double> q, double s,
                               std::span<double> out) const = 0;

 protected:
  virtual void hessP(std::span<const double> p, std::span<const double> u, std::span<const double> v,
                     std::span<double> out) const = 0;
};

/// Target given in a single chart by its metric and Christoffel symbols.
class ChartTarget {
 public:
  virtual ~ChartTarget() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual CurvatureSign curvature_sign() const = 0;

  /// Row-major n×n metric h_ij(f).
  virtual void metric(std::span<const double> f, std::span<double> out) const = 0;
  virtual bool in_guard(std::span<const double> f) const = 0;

  /// Γ^k_ij(f) u^i v^j. Throws GuardViolation outside the guard region.
  void christoffel_contract(std::span<const double> f, std::span<const double> u, std::span<const double> v,
                            std::span<double> out) const;

  /// h_ij(f) u^i v^j.
  double metric_pair(std::span<const double> f, std::span<const double> u, std::span<const double> v) const;

  virtual double distance(std::span<const double> p, std::span<const double> q) const = 0;
  virtual void geodesic_interp(std::span<const double> p, std::span<const double> q, double s,
                               std::span<double> out) const = 0;

 protected:
  virtual void christoffel(std::span<const double> f, std::span<const double> u, std::span<const double> v,
                           std::span<double> out) const = 0;
  virtual std::string guard_description(std::span<const double> f) const = 0;
  virtual double guard_measure(std::span<const double> f) const = 0;
};

/// Unit sphere S² ⊂ ℝ³, P(p) = p/|p|.
class Sphere2 final : public EmbeddedTarget {
 public:
  std::string name() const override { return "sphere2"; }
  int ambient_dim() const override { return 3; }
  double tube_radius() const override { return 0.5; }
  CurvatureSign curvature_sign() const override { return CurvatureSign::Positive; }
  double distance_to_target(std::span<const double> p) const override;
  void project(std::span<const double> p, std::span<double> out) const override;
  void dP(std::span<const double> p, std::span<const double> v, std::span<double> out) const override;
  double distance(std::span<const double> p, std::span<const double> q) const override;
  /// Antipodal pairs follow the great circle through the reference axis e_z
  /// (e_x when p is a pole).
  void geodesic_interp(std::span<const double> p, std::span<const double> q, double s,
                       std::span<double> out) const override;

 protected:
  void hessP(std::span<const double> p, std::span<const double> u, std::span<const double> v,
             std::span<double> out) const override;
};

/// Clifford torus {(a, b) ∈ ℝ²×ℝ² : |a| = |b| = 1/√2}, a flat product of
/// two circles projected factorwise.
class CliffordTorus final : public EmbeddedTarget {
 public:
  static constexpr double kRadius = 0.70710678118654752440;

  std::string name() const override { return "clifford"; }
  int ambient_dim() const override { return 4; }
  double tube_radius() const override { return 0.25; }
  CurvatureSign curvature_sign() const override { return CurvatureSign::Zero; }
  double distance_to_target(std::span<const double> p) const override;
  void project(std::span<const double> p, std::span<double> out) const override;
  void dP(std::span<const double> p, std::span<const double> v, std::span<double> out) const override;
  double distance(std::span<const double> p, std::span<const double> q) const override;
  void geodesic_interp(std::span<const double> p, std::span<const double> q, double s,
                       std::span<double> out) const override;

  /// Angles (atan2) of the two factors.
  static std::pair<double, double> angles(std::span<const double> p);
  static void from_angles(double a1, double a2, std::span<double> out);

 protected:
  void hessP(std::span<const double> p, std::span<const double> u, std::span<const double> v,
             std::span<double> out) const override;
};

/// ℝ^K itself; P is the identity.
class EuclideanTarget final : public EmbeddedTarget {
 public:
  explicit EuclideanTarget(int k);
  std::string name() const override { return "euclidean"; }
  int ambient_dim() const override { return k_; }
  double tube_radius() const override { return std::numeric_limits<double>::infinity(); }
  CurvatureSign curvature_sign() const override { return CurvatureSign::Zero; }
  double distance_to_target(std::span<const double>) const override { return 0.0; }
  void project(std::span<const double> p, std::span<double> out) const override;
  void dP(std::span<const double> p, std::span<const double> v, std::span<double> out) const override;
  double distance(std::span<const double> p, std::span<const double> q) const override;
  void geodesic_interp(std::span<const double> p, std::span<const double> q, double s,
                       std::span<double> out) const override;

 protected:
  void hessP(std::span<const double> p, std::span<const double> u, std::span<const double> v,
             std::span<double> out) const override;

 private:
  int k_;
};

/// Poincaré disk, h_ij = 4δ_ij/(1 − |f|²)², restricted to |f| ≤ guard.
class PoincareDisk final : public ChartTarget {
 public:
  explicit PoincareDisk(double guard = 0.9) : guard_(guard) {}
  std::string name() const override { return "poincare"; }
  int dim() const override { return 2; }
  CurvatureSign curvature_sign() const override { return CurvatureSign::Negative; }
  void metric(std::span<const double> f, std::span<double> out) const override;
  bool in_guard(std::span<const double> f) const override;
  double guard() const { return guard_; }
  /// 2 artanh |(p − q)/(1 − p̄q)|.
  double distance(std::span<const double> p, std::span<const double> q) const override;
  void geodesic_interp(std::span<const double> p, std::span<const double> q, double s,
                       std::span<double> out) const override;

 protected:
  void christoffel(std::span<const double> f, std::span<const double> u, std::span<const double> v,
                   std::span<double> out) const override;
  std::string guard_description(std::span<const double> f) const override;
  double guard_measure(std::span<const double> f) const override;

 private:
  double guard_;
};

/// Angle chart of the Clifford torus: f = (α₁, α₂), h = R²δ, Γ ≡ 0.
class FlatTorusChart final : public ChartTarget {
 public:
  std::string name() const override { return "flat_torus"; }
  int dim() const override { return 2; }
  CurvatureSign curvature_sign() const override { return CurvatureSign::Zero; }
  void metric(std::span<const double> f, std::span<double> out) const override;
  bool in_guard(std::span<const double> f) const override;
  double distance(std::span<const double> p, std::span<const double> q) const override;
  void geodesic_interp(std::span<const double> p, std::span<const double> q, double s,
                       std::span<double> out) const override;

 protected:
  void christoffel(std::span<const double> f, std::span<const double> u, std::span<const double> v,
                   std::span<double> out) const override;
  std::string guard_description(std::span<const double> f) const override;
  double guard_measure(std::span<const double> f) const override;
};

/// Wraps an angle difference to (−π, π], ties going to +π.
double wrap_angle(double d);

/// Either an embedded or a chart target; decides the flow mode.
class Target {
 public:
  static Target embedded(std::shared_ptr<const EmbeddedTarget> t);
  static Target chart(std::shared_ptr<const ChartTarget> t);

  Mode mode() const { return embedded_ ? Mode::Extrinsic : Mode::Intrinsic; }
  const EmbeddedTarget& embedded() const;
  const ChartTarget& chart() const;
  int dim() const;
  std::string name() const;
  CurvatureSign curvature_sign() const;

  double distance(std::span<const double> p, std::span<const double> q) const;
  void geodesic_interp(std::span<const double> p, std::span<const double> q, double s,
                       std::span<double> out) const;

 private:
  std::shared_ptr<const EmbeddedTarget> embedded_;
  std::shared_ptr<const ChartTarget> chart_;
};

/// Target by name: sphere2, clifford, euclidean (with dimension k), poincare,
/// flat_torus.
Target make_target(const std::string& name, int euclidean_k = 3);

}  // namespace subrh
