#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "subrh/fields.hpp"
#include "subrh/records.hpp"
#include "subrh/targets.hpp"

namespace subrh {

struct FlowState {
  MapField u;
  Target target;
  double t = 0.0;
  long step = 0;

  Mode mode() const { return target.mode(); }
};

/// Raised by the implicit step when the linear solve does not converge.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// τ(u). Extrinsic: Δ_H u^a − P^a_{bc}(u)(Xu^b Xu^c + Yu^b Yu^c).
/// Intrinsic: Δ_H f^i + Γ^i_{jk}(f)(Xf^j Xf^k + Yf^j Yf^k).
/// Throws TubeViolation / GuardViolation at the first offending point.
MapField tension(const MapField& u, const Target& target);

/// Tangential part dP(u)·τ of the extrinsic tension (τ itself in intrinsic
/// mode). This is the velocity the re-projected flow actually follows.
MapField tangential_tension(const MapField& u, const MapField& tau, const Target& target);

struct TensionNorms {
  double l2 = 0.0;
  double sup = 0.0;
};

/// Norms of the tangential tension; the metric-weighted norm in intrinsic mode.
TensionNorms tension_norms(const MapField& u, const MapField& tau, const Target& target);

struct StepOptions {
  /// Re-project every R-th step in extrinsic mode; 0 disables re-projection.
  int reproject_every = 1;
  int imex_max_iterations = 500;
  double imex_tolerance = 1e-10;
};

/// Checks the tube/guard invariant and reports the worst grid point.
void check_state(const MapField& u, const Target& target);

/// Replaces every value by its closest point on N.
void reproject(MapField& u, const EmbeddedTarget& target);

/// u ← u + dt τ(u), then re-projection and invariant check.
FlowState step_explicit(const FlowState& s, double dt, const StepOptions& opts = {});

/// (I − dt Δ_H) u_new = u + dt (τ(u) − Δ_H u), solved per component by
/// conjugate gradients.
FlowState step_imex(const FlowState& s, double dt, const StepOptions& opts = {});

enum class Integrator { Explicit, Imex };
std::string to_string(Integrator i);

struct StopCriteria {
  double tau_tol_l2 = 1e-6;
  double tau_tol_sup = 1e-6;
  double t_max = 50.0;
  long plateau_window = 1000;
};

enum class Termination { TensionL2, TensionSup, TimeLimit, Plateau, Aborted };
std::string to_string(Termination t);

struct FlowOptions {
  Integrator integrator = Integrator::Explicit;
  double dt = 0.0;
  StepOptions step;
  long record_every = 1;
};

struct FlowResult {
  FlowState state;
  std::vector<DiagnosticsRecord> records;
  Termination termination = Termination::TimeLimit;
  std::string error;
};

/// Steps until the first stop criterion holds. Step errors end the run with
/// Termination::Aborted and the records gathered so far.
FlowResult run_flow(FlowState s, const StopCriteria& stop, const FlowOptions& opts);

struct PicardResult {
  /// u_0 … u_k evaluated at t_horizon.
  std::vector<MapField> iterates;
  /// X_k = sup_t (sup|u_k − u_{k−1}| + sup|∇_H(u_k − u_{k−1})|), k = 1 … k_max.
  std::vector<double> differences;
  /// X_{k+1}/X_k.
  std::vector<double> ratios;
  bool diverged = false;
  long substeps = 0;
  double dt = 0.0;
};

/// Picard iteration for the ambient system on [0, t_horizon]:
/// u_0 = e^{tΔ_H} φ, u_k = u_0 − ∫ e^{(t−s)Δ_H} F(u_{k−1}(s)) ds with
/// F^a = P^a_{bc}(u)⟨∇_H u^b, ∇_H u^c⟩, propagator and quadrature both by
/// explicit heat sub-steps of size ≤ dt.
PicardResult duhamel_picard(const MapField& phi, const EmbeddedTarget& target, double t_horizon, int k_max,
                            double dt);

}  // namespace subrh
