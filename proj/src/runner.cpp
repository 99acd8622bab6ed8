#include "subrh/runner.hpp"

#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "subrh/diagnostics.hpp"
#include "subrh/initial_data.hpp"
#include "subrh/lattice.hpp"
#include "subrh/ops.hpp"
#include "subrh/records_io.hpp"
#include "subrh/snapshot.hpp"

namespace subrh {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "1.0.0";

Verdict verdict(std::string name, double slack, double tolerance) {
  return Verdict{std::move(name), slack, tolerance, slack >= -tolerance};
}

// NaN and infinities are not JSON numbers; they are written as strings.
ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

ordered_json to_json(const Verdict& v) {
  return ordered_json{{"name", v.name}, {"slack", number(v.slack)}, {"tolerance", v.tolerance}, {"pass", v.pass}};
}

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Everything a scenario hands back to the common output code.
struct ScenarioOutput {
  RecordTable table;
  ordered_json metrics = ordered_json::object();
  std::vector<Verdict> verdicts;
  /// Runtime abort that still left usable partial output.
  std::string error;
};

class Context {
 public:
  explicit Context(const RunConfig& c) : config(c), grid(c.grid_n), dt(c.resolved_dt()) {}

  const RunConfig& config;
  Grid grid;
  double dt;

  double scale() const { return grid.h() * grid.h() + dt; }

  InitialDataOptions initial_options() const {
    InitialDataOptions o;
    o.amplitude = config.amplitude;
    o.z_dependent = config.z_dependent;
    o.winding = config.winding;
    o.radial_offset = config.radial_offset;
    o.max_mode = config.max_mode;
    return o;
  }

  MapField initial(const Target& target, std::uint64_t seed) const {
    if (config.initial_kind == "standard") {
      if (target.name() != "clifford") throw ConfigError("initial.kind = standard needs the clifford target");
      return standard_torus_map(grid);
    }
    return initial_map(target, grid, seed, initial_options());
  }

  void snapshot(const MapField& u, const std::string& name, double t, std::uint64_t seed) const {
    if (!config.snapshots) return;
    const fs::path dir = config.out_dir / "snapshots";
    fs::create_directories(dir);
    write_snapshot(u, dir / (name + ".bin"), SnapshotMeta{t, to_string(config.scenario), seed});
  }

  FlowOptions flow_options() const {
    FlowOptions fo;
    fo.integrator = config.integrator;
    fo.dt = dt;
    fo.record_every = config.record_every;
    fo.step.reproject_every = config.reproject_every;
    return fo;
  }
};

ScenarioOutput run_heat(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Target target = make_target("euclidean", 1);
  SmoothFieldOptions so{c.max_mode, c.z_dependent, c.amplitude > 0.0 ? c.amplitude : 1.0};
  FlowState s{MapField(std::vector<ScalarField>{random_smooth_scalar(ctx.grid, c.seed, so)}), target, 0.0, 0};
  ctx.snapshot(s.u, "initial", 0.0, c.seed);
  const double mass0 = integrate(s.u[0]);
  const double sup0 = *std::max_element(s.u[0].data().begin(), s.u[0].data().end());
  double drift = 0.0, excess = 0.0, prev_energy = std::numeric_limits<double>::infinity();
  double max_increase = -std::numeric_limits<double>::infinity();

  std::vector<DiagnosticsRecord> records;
  auto record = [&] {
    const MapField tau = tension(s.u, target);
    DiagnosticsRecord r = make_record(s.u, target, tension_norms(s.u, tau, target));
    r.step = s.step;
    r.t = s.t;
    const double d = std::abs(integrate(s.u[0]) - mass0);
    r.verdicts = {verdict("mass_conservation", -d, c.mass_tolerance),
                  verdict("energy_nonincreasing", std::isfinite(prev_energy) ? prev_energy - r.e_h : 0.0,
                          c.monotone_tolerance)};
    if (std::isfinite(prev_energy)) max_increase = std::max(max_increase, r.e_h - prev_energy);
    prev_energy = r.e_h;
    records.push_back(std::move(r));
  };

  ScenarioOutput out;
  record();
  for (long n = 1; n <= c.heat_steps; ++n) {
    s = c.integrator == Integrator::Explicit ? step_explicit(s, ctx.dt) : step_imex(s, ctx.dt);
    drift = std::max(drift, std::abs(integrate(s.u[0]) - mass0));
    excess = std::max(excess, *std::max_element(s.u[0].data().begin(), s.u[0].data().end()) - sup0);
    if (n % c.record_every == 0 || n == c.heat_steps) record();
  }
  ctx.snapshot(s.u, "final", s.t, c.seed);
  out.table = flow_table(records);
  if (!std::isfinite(max_increase)) max_increase = 0.0;
  out.metrics["steps"] = c.heat_steps;
  out.metrics["t_final"] = s.t;
  out.metrics["mass_initial"] = mass0;
  out.metrics["mass_drift"] = drift;
  out.metrics["sup_excess"] = excess;
  out.metrics["max_energy_increase"] = max_increase;
  out.verdicts = {verdict("mass_conservation", -drift, c.mass_tolerance),
                  verdict("energy_nonincreasing", -max_increase, c.monotone_tolerance)};
  return out;
}

ScenarioOutput run_flow_scenario(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Target target = make_target(c.target, c.euclidean_k);
  FlowState s{ctx.initial(target, c.seed), target, 0.0, 0};
  ctx.snapshot(s.u, "initial", 0.0, c.seed);
  const bool torus = target.name() == "clifford";
  const WindingNumbers w0 = torus ? winding_numbers(s.u) : WindingNumbers{};

  FlowResult res = run_flow(s, c.stop, ctx.flow_options());
  AnnotationOptions ao;
  ao.monotonicity = {c.monotone_tolerance, c.identity_constant * ctx.scale(), c.convexity_constant * ctx.scale()};
  ao.reeb_t0 = c.reeb_t0;
  ao.reeb_tolerance = c.reeb_constant * ctx.scale();
  annotate_records(res.records, target.curvature_sign(), ao);
  ctx.snapshot(res.state.u, "final", res.state.t, c.seed);

  ScenarioOutput out;
  out.table = flow_table(res.records);
  const MonotonicityReport m = monotonicity_report(res.records, target.curvature_sign(), ao.monotonicity);
  out.verdicts = {m.nonincreasing, m.energy_identity};
  if (m.convexity_checked) out.verdicts.push_back(m.convexity);
  out.metrics["termination"] = to_string(res.termination);
  out.metrics["steps"] = res.state.step;
  out.metrics["t_final"] = res.state.t;
  if (!res.records.empty()) {
    const auto& last = res.records.back();
    out.metrics["E_H_final"] = last.e_h;
    out.metrics["E_R_final"] = last.e_r;
    out.metrics["tau_l2_final"] = last.tau_l2;
    out.metrics["tau_sup_final"] = last.tau_sup;
  }
  out.metrics["max_energy_increase"] = m.max_increase;
  out.metrics["max_identity_residual"] = m.max_identity_residual;
  out.metrics["identity_constant_measured"] = m.max_identity_residual / ctx.scale();
  out.metrics["min_second_difference"] = m.min_second_difference;
  if (!res.records.empty() && res.records.back().t > c.reeb_t0) {
    const ReebReport rb = reeb_bound_report(res.records, c.reeb_t0, ao.reeb_tolerance);
    out.verdicts.push_back(rb.bound);
    out.metrics["reeb_min_slack"] = rb.min_slack;
    out.metrics["reeb_tail_slack"] = rb.tail_slack;
  }
  if (torus) {
    const WindingNumbers w1 = winding_numbers(res.state.u);
    out.metrics["winding_initial"] = w0.matrix;
    out.metrics["winding_final"] = w1.matrix;
    out.metrics["winding_residual"] = std::max(w0.max_residual, w1.max_residual);
    const bool same = w0.matrix == w1.matrix && w0.consistent && w1.consistent;
    out.verdicts.push_back(Verdict{"winding_preserved", same ? 0.0 : -1.0, 0.0, same});
  }
  if (res.termination == Termination::Aborted) out.error = res.error;
  return out;
}

ScenarioOutput run_picard(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Target target = make_target(c.target, c.euclidean_k);
  const MapField phi = ctx.initial(target, c.seed);
  ctx.snapshot(phi, "initial", 0.0, c.seed);
  ScenarioOutput out;
  out.table.columns = {"t_horizon", "max_ratio", "first_difference", "last_difference", "iterations", "diverged"};
  std::vector<double> max_ratios;
  double threshold = 0.0;
  bool contracting = true;
  ordered_json per = ordered_json::array();
  for (double th : c.picard_horizons) {
    const PicardResult r = duhamel_picard(phi, target.embedded(), th, c.picard_k_max, ctx.dt);
    double mr = r.ratios.empty() ? 0.0 : *std::max_element(r.ratios.begin(), r.ratios.end());
    if (r.diverged) mr = std::numeric_limits<double>::infinity();
    max_ratios.push_back(mr);
    contracting = contracting && mr <= 0.5;
    if (contracting) threshold = th;
    const double first = r.differences.empty() ? 0.0 : r.differences.front();
    const double last = r.differences.empty() ? 0.0 : r.differences.back();
    out.table.add_row({th, mr, first, last, static_cast<double>(r.differences.size()), r.diverged ? 1.0 : 0.0});
    per.push_back({{"t_horizon", th}, {"ratios", r.ratios}, {"differences", r.differences},
                   {"diverged", r.diverged}, {"substeps", r.substeps}});
  }
  double min_rise = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < max_ratios.size(); ++i)
    if (std::isfinite(max_ratios[i - 1])) min_rise = std::min(min_rise, max_ratios[i] - max_ratios[i - 1]);
  if (!std::isfinite(min_rise)) min_rise = 0.0;
  out.metrics["horizons"] = per;
  out.metrics["contraction_threshold"] = threshold;
  out.verdicts = {verdict("contraction", 0.5 - (max_ratios.empty() ? 0.0 : max_ratios.front()), 0.0),
                  verdict("ratios_monotone", min_rise, 1e-3)};

  if (c.picard_compare_horizon > 0.0) {
    const PicardResult r = duhamel_picard(phi, target.embedded(), c.picard_compare_horizon, c.picard_k_max, ctx.dt);
    if (r.diverged) throw std::runtime_error("picard iteration diverged at the comparison horizon");
    FlowOptions fo;
    fo.dt = r.dt;
    fo.record_every = std::numeric_limits<long>::max();
    fo.step.reproject_every = 0;
    StopCriteria sc;
    sc.t_max = c.picard_compare_horizon;
    sc.tau_tol_l2 = sc.tau_tol_sup = std::numeric_limits<double>::min();
    sc.plateau_window = std::numeric_limits<long>::max();
    const FlowResult fr = run_flow(FlowState{phi, target, 0.0, 0}, sc, fo);
    if (fr.termination == Termination::Aborted) throw std::runtime_error(fr.error);
    const double diff = sup_distance(fr.state.u, r.iterates.back());
    const double scale = ctx.grid.h() * ctx.grid.h() + r.dt;
    out.metrics["flow_agreement"] = {{"t_horizon", c.picard_compare_horizon},
                                     {"sup_difference", diff},
                                     {"scale", scale},
                                     {"constant", diff / scale}};
  }
  return out;
}

ScenarioOutput run_homotopy(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Target target = make_target("clifford");
  const MapField u = standard_torus_map(ctx.grid);
  const MapField v = standard_torus_map(ctx.grid, c.homotopy_shift[0], c.homotopy_shift[1]);
  ctx.snapshot(u, "u", 0.0, c.seed);
  ctx.snapshot(v, "v", 0.0, c.seed);
  const HomotopyProfile p = geodesic_homotopy_suite(u, v, target, c.homotopy_subdivisions);
  ScenarioOutput out;
  out.table.columns = {"s", "E_H", "tau_l2", "tau_sup"};
  for (std::size_t i = 0; i < p.s.size(); ++i) out.table.add_row({p.s[i], p.energy[i], p.tau_l2[i], p.tau_sup[i]});
  const double h2 = ctx.grid.h() * ctx.grid.h();
  out.metrics["max_energy_deviation"] = p.max_energy_deviation;
  out.metrics["max_tau_l2"] = p.max_tau_l2;
  out.metrics["max_tau_sup"] = p.max_tau_sup;
  out.metrics["energy"] = p.energy.front();
  out.verdicts = {verdict("energy_constant", -p.max_energy_deviation, c.energy_constant * h2),
                  verdict("tension_small", 10.0 * c.stop.tau_tol_l2 - p.max_tau_l2, 0.0),
                  Verdict{"winding_constant", p.winding_constant ? 0.0 : -1.0, 0.0, p.winding_constant}};
  return out;
}

ScenarioOutput run_kernel_probe(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const KernelProbeResult r = c.kernel_lattice ? heat_kernel_probe(c.grid_n, c.kernel_fit_lo, c.kernel_fit_hi)
                                               : grid_heat_kernel_probe(c.grid_n, c.kernel_fit_lo, c.kernel_fit_hi);
  ScenarioOutput out;
  out.table.columns = {"t", "sup"};
  for (std::size_t i = 0; i < r.times.size(); ++i) out.table.add_row({r.times[i], r.sups[i]});
  out.metrics["discretization"] = c.kernel_lattice ? "lattice" : "grid";
  out.metrics["fitted_exponent"] = r.exponent;
  out.metrics["fit_lo"] = r.fit_lo;
  out.metrics["fit_hi"] = r.fit_hi;
  out.metrics["mass_drift"] = r.max_mass_drift;
  out.metrics["min_value"] = r.min_value;
  out.verdicts = {verdict("decay_exponent", 0.3 - std::abs(r.exponent + 2.0), 0.0),
                  verdict("mass_conservation", -r.max_mass_drift, c.mass_tolerance),
                  verdict("positivity", r.min_value, 1e-12)};
  return out;
}

ScenarioOutput run_cc_ball(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const BallScaling b = cc_ball_scaling(c.grid_n, c.cc_delta_lo, c.cc_delta_hi);
  ScenarioOutput out;
  out.table.columns = {"delta", "volume"};
  for (std::size_t i = 0; i < b.radii.size(); ++i) out.table.add_row({b.radii[i], b.volumes[i]});
  out.metrics["fitted_exponent"] = b.exponent;
  out.verdicts = {verdict("volume_exponent", 0.4 - std::abs(b.exponent - 4.0), 0.0)};
  return out;
}

ScenarioOutput run_distance(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Target target = make_target(c.target, c.euclidean_k);
  FlowState a{ctx.initial(target, c.seed), target, 0.0, 0};
  FlowState b{ctx.initial(target, c.distance_seed), target, 0.0, 0};
  ctx.snapshot(a.u, "initial_a", 0.0, c.seed);
  ctx.snapshot(b.u, "initial_b", 0.0, c.distance_seed);
  StepOptions so;
  so.reproject_every = c.reproject_every;
  ScenarioOutput out;
  out.table.columns = {"t", "distance", "E_H_a", "E_H_b"};
  auto sample = [&] {
    out.table.add_row({a.t, map_distance(a.u, b.u, target), energies(a.u, target).e_h, energies(b.u, target).e_h});
  };
  sample();
  const long steps = static_cast<long>(std::ceil(c.stop.t_max / ctx.dt - 1e-9));
  for (long n = 1; n <= steps; ++n) {
    const double dt = std::min(ctx.dt, c.stop.t_max - a.t);
    if (c.integrator == Integrator::Explicit) {
      a = step_explicit(a, dt, so);
      b = step_explicit(b, dt, so);
    } else {
      a = step_imex(a, dt, so);
      b = step_imex(b, dt, so);
    }
    if (n % c.distance_every == 0 || n == steps) sample();
  }
  ctx.snapshot(a.u, "final_a", a.t, c.seed);
  ctx.snapshot(b.u, "final_b", b.t, c.distance_seed);
  const std::size_t col = out.table.column("distance");
  double max_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < out.table.rows.size(); ++i)
    max_increase = std::max(max_increase, out.table.rows[i][col] - out.table.rows[i - 1][col]);
  if (!std::isfinite(max_increase)) max_increase = 0.0;
  out.metrics["distance_initial"] = out.table.rows.front()[col];
  out.metrics["distance_final"] = out.table.rows.back()[col];
  out.metrics["max_distance_increase"] = max_increase;
  out.verdicts = {verdict("distance_nonincreasing", -max_increase, c.distance_constant * ctx.scale())};
  return out;
}

ScenarioOutput dispatch(const Context& ctx) {
  switch (ctx.config.scenario) {
    case Scenario::Heat: return run_heat(ctx);
    case Scenario::Flow: return run_flow_scenario(ctx);
    case Scenario::Picard: return run_picard(ctx);
    case Scenario::Homotopy: return run_homotopy(ctx);
    case Scenario::KernelProbe: return run_kernel_probe(ctx);
    case Scenario::CcBall: return run_cc_ball(ctx);
    case Scenario::DistanceMonotone: return run_distance(ctx);
  }
  throw std::logic_error("unhandled scenario");
}

std::string compiler_version() {
#if defined(__clang__)
  return std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  return std::string("gcc ") + __VERSION__;
#else
  return "unknown";
#endif
}

}  // namespace

std::string git_blob_hash(const std::string& content) {
  const std::string data = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("SHA-1 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

RunOutcome run(const RunConfig& config) {
  fs::create_directories(config.out_dir);
  const Config echo = config.to_config();
  ordered_json manifest;
  manifest["program"] = "subrh";
  manifest["version"] = kVersion;
  manifest["model"] = "nil3";
  manifest["config"] = echo.values();
  manifest["config_hash"] = git_blob_hash(echo.text());
  manifest["versions"] = {{"subrh", kVersion},
                          {"compiler", compiler_version()},
                          {"cplusplus", static_cast<long>(__cplusplus)},
                          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                          {"openssl", OPENSSL_VERSION_TEXT}};

  RunOutcome outcome;
  ScenarioOutput result;
  const Context ctx(config);
  try {
    result = dispatch(ctx);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  if (outcome.error.empty()) outcome.error = result.error;

  write_csv(config.out_dir / "records.csv", result.table);
  outcome.verdicts = result.verdicts;
  const bool all_pass =
      outcome.error.empty() && std::all_of(result.verdicts.begin(), result.verdicts.end(), [](const Verdict& v) { return v.pass; });
  outcome.exit_status = all_pass ? 0 : 1;

  ordered_json summary;
  summary["scenario"] = to_string(config.scenario);
  summary["grid_n"] = config.grid_n;
  summary["dt"] = ctx.dt;
  summary["seed"] = config.seed;
  summary["status"] = outcome.error.empty() ? "completed" : "aborted";
  if (!outcome.error.empty()) summary["error"] = outcome.error;
  for (auto& [k, v] : result.metrics.items()) summary[k] = v.is_number_float() ? number(v.get<double>()) : v;
  ordered_json verdicts = ordered_json::array();
  for (const auto& v : result.verdicts) verdicts.push_back(to_json(v));
  summary["verdicts"] = verdicts;
  summary["all_pass"] = all_pass;
  write_json(config.out_dir / "summary.json", summary);

  manifest["outputs"] = {"records.csv", "summary.json"};
  manifest["exit_status"] = outcome.exit_status;
  write_json(config.out_dir / "manifest.json", manifest);
  return outcome;
}

}  // namespace subrh
