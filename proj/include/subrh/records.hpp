#pragma once

#include <string>
#include <vector>

namespace subrh {

/// Named check outcome. `slack` ≥ −tolerance means pass.
struct Verdict {
  std::string name;
  double slack = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct DiagnosticsRecord {
  long step = 0;
  double t = 0.0;
  double e_h = 0.0;
  double e_r = 0.0;
  double e_total = 0.0;
  double tau_l2 = 0.0;
  double tau_sup = 0.0;
  /// ∫|ρ(u)|² (extrinsic targets; 0 otherwise).
  double rho_l2 = 0.0;
  std::vector<Verdict> verdicts;
};

}  // namespace subrh
