#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "subrh/flow.hpp"

namespace subrh {

/// Invalid or inconsistent configuration (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plain key=value text with one nesting level ("section.key = value").
/// '#' starts a comment; blank lines are ignored; duplicate keys are errors.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config parse_string(const std::string& text, const std::string& source = "<config>");
  /// Reads a key=value file, or the "config" object of a run manifest when
  /// the file is JSON.
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  void set(const std::string& key, std::string value);
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Sorted "key = value" lines; parse(text()) reproduces the config.
  std::string text() const;

 private:
  std::map<std::string, std::string> values_;
};

enum class Scenario { Heat, Flow, Picard, Homotopy, KernelProbe, CcBall, DistanceMonotone };
std::string to_string(Scenario s);

struct RunConfig {
  Scenario scenario = Scenario::Flow;
  int grid_n = 16;
  /// Empty means "auto" (h²/10).
  std::optional<double> dt;
  std::string target = "clifford";
  int euclidean_k = 3;
  Mode mode = Mode::Extrinsic;
  Integrator integrator = Integrator::Explicit;
  StopCriteria stop;
  int reproject_every = 1;
  long record_every = 1;
  std::uint64_t seed = 7;
  std::filesystem::path out_dir = "out";

  // initial data
  std::string initial_kind = "random";
  double amplitude = 0.3;
  bool z_dependent = false;
  int max_mode = 3;
  double radial_offset = 0.0;
  std::array<int, 4> winding{1, 0, 0, 1};

  // scenario parameters
  long heat_steps = 10000;
  std::vector<double> picard_horizons{0.001, 0.002, 0.004, 0.008, 0.016};
  int picard_k_max = 6;
  double picard_compare_horizon = 0.008;
  int homotopy_subdivisions = 8;
  std::array<double, 2> homotopy_shift{0.3, 0.7};
  bool kernel_lattice = true;
  double kernel_fit_lo = 0.005;
  double kernel_fit_hi = 0.05;
  double cc_delta_lo = 0.0625;
  double cc_delta_hi = 0.25;
  std::uint64_t distance_seed = 8;
  int distance_every = 1;

  // verdict tolerances
  double monotone_tolerance = 1e-12;
  double identity_constant = 500.0;
  double convexity_constant = 500.0;
  double reeb_t0 = 0.05;
  double reeb_constant = 10.0;
  double mass_tolerance = 1e-12;
  double energy_constant = 10.0;
  double distance_constant = 1.0;

  bool snapshots = true;

  double resolved_dt() const;
  /// Every setting, including defaults, as a Config.
  Config to_config() const;
};

/// Validates and converts; unknown keys and out-of-range values throw ConfigError.
RunConfig make_run_config(const Config& config);

}  // namespace subrh
