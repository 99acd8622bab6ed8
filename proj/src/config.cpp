#include "subrh/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "subrh/fields.hpp"
#include "subrh/ops.hpp"
#include "subrh/records_io.hpp"

namespace subrh {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double r = 0.0;
  try {
    r = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return r;
}

long parse_long(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long r = 0;
  try {
    r = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return r;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  std::uint64_t r = 0;
  try {
    if (!v.empty() && v[0] != '-') r = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
  return r;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

struct Entry {
  std::function<void(RunConfig&, const std::string& key, const std::string& value)> read;
  std::function<std::string(const RunConfig&)> write;
};

template <typename T>
Entry number(T RunConfig::*field) {
  return {[field](RunConfig& c, const std::string& k, const std::string& v) {
            if constexpr (std::is_same_v<T, double>)
              c.*field = parse_double(k, v);
            else if constexpr (std::is_same_v<T, std::uint64_t>)
              c.*field = parse_u64(k, v);
            else
              c.*field = static_cast<T>(parse_long(k, v));
          },
          [field](const RunConfig& c) {
            if constexpr (std::is_same_v<T, double>)
              return format_number(c.*field);
            else
              return std::to_string(c.*field);
          }};
}

Entry flag(bool RunConfig::*field) {
  return {[field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = parse_bool(k, v); },
          [field](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); }};
}

const std::map<std::string, Entry>& entries() {
  static const std::map<std::string, Entry> table = [] {
    std::map<std::string, Entry> t;
    t["scenario"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                       static const std::map<std::string, Scenario> names{
                           {"heat", Scenario::Heat},
                           {"flow", Scenario::Flow},
                           {"picard", Scenario::Picard},
                           {"homotopy", Scenario::Homotopy},
                           {"kernel_probe", Scenario::KernelProbe},
                           {"cc_ball", Scenario::CcBall},
                           {"distance_monotone", Scenario::DistanceMonotone}};
                       const auto it = names.find(v);
                       if (it == names.end()) throw ConfigError(k + ": unknown scenario '" + v + "'");
                       c.scenario = it->second;
                     },
                     [](const RunConfig& c) { return to_string(c.scenario); }};
    t["grid.n"] = number(&RunConfig::grid_n);
    t["time.dt"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                      if (v == "auto")
                        c.dt.reset();
                      else
                        c.dt = parse_double(k, v);
                    },
                    [](const RunConfig& c) { return c.dt ? format_number(*c.dt) : std::string("auto"); }};
    t["target.name"] = {[](RunConfig& c, const std::string&, const std::string& v) { c.target = v; },
                        [](const RunConfig& c) { return c.target; }};
    t["target.k"] = number(&RunConfig::euclidean_k);
    t["target.mode"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                          if (v == "extrinsic")
                            c.mode = Mode::Extrinsic;
                          else if (v == "intrinsic")
                            c.mode = Mode::Intrinsic;
                          else
                            throw ConfigError(k + ": expected extrinsic or intrinsic, got '" + v + "'");
                        },
                        [](const RunConfig& c) { return to_string(c.mode); }};
    t["flow.integrator"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                              if (v == "explicit")
                                c.integrator = Integrator::Explicit;
                              else if (v == "imex")
                                c.integrator = Integrator::Imex;
                              else
                                throw ConfigError(k + ": expected explicit or imex, got '" + v + "'");
                            },
                            [](const RunConfig& c) { return to_string(c.integrator); }};
    t["flow.reproject_every"] = number(&RunConfig::reproject_every);
    t["flow.record_every"] = number(&RunConfig::record_every);
    t["stop.tau_l2"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.stop.tau_tol_l2 = parse_double(k, v); },
                        [](const RunConfig& c) { return format_number(c.stop.tau_tol_l2); }};
    t["stop.tau_sup"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.stop.tau_tol_sup = parse_double(k, v); },
                         [](const RunConfig& c) { return format_number(c.stop.tau_tol_sup); }};
    t["stop.t_max"] = {[](RunConfig& c, const std::string& k, const std::string& v) { c.stop.t_max = parse_double(k, v); },
                       [](const RunConfig& c) { return format_number(c.stop.t_max); }};
    t["stop.plateau_window"] = {
        [](RunConfig& c, const std::string& k, const std::string& v) { c.stop.plateau_window = parse_long(k, v); },
        [](const RunConfig& c) { return std::to_string(c.stop.plateau_window); }};
    t["run.seed"] = number(&RunConfig::seed);
    t["run.out_dir"] = {[](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; },
                        [](const RunConfig& c) { return c.out_dir.string(); }};
    t["run.snapshots"] = flag(&RunConfig::snapshots);
    t["initial.kind"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                           if (v != "random" && v != "standard")
                             throw ConfigError(k + ": expected random or standard, got '" + v + "'");
                           c.initial_kind = v;
                         },
                         [](const RunConfig& c) { return c.initial_kind; }};
    t["initial.amplitude"] = number(&RunConfig::amplitude);
    t["initial.z_dependent"] = flag(&RunConfig::z_dependent);
    t["initial.max_mode"] = number(&RunConfig::max_mode);
    t["initial.radial_offset"] = number(&RunConfig::radial_offset);
    t["initial.winding"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                              const auto list = parse_list(k, v);
                              if (list.size() != 4) throw ConfigError(k + ": expected four integers");
                              for (std::size_t i = 0; i < 4; ++i) {
                                if (list[i] != std::round(list[i])) throw ConfigError(k + ": expected integers");
                                c.winding[i] = static_cast<int>(list[i]);
                              }
                            },
                            [](const RunConfig& c) {
                              std::string s;
                              for (std::size_t i = 0; i < 4; ++i) s += (i ? "," : "") + std::to_string(c.winding[i]);
                              return s;
                            }};
    t["heat.steps"] = number(&RunConfig::heat_steps);
    t["picard.horizons"] = {
        [](RunConfig& c, const std::string& k, const std::string& v) { c.picard_horizons = parse_list(k, v); },
        [](const RunConfig& c) { return join(c.picard_horizons); }};
    t["picard.k_max"] = number(&RunConfig::picard_k_max);
    t["picard.compare_horizon"] = number(&RunConfig::picard_compare_horizon);
    t["homotopy.subdivisions"] = number(&RunConfig::homotopy_subdivisions);
    t["homotopy.shift"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                             const auto list = parse_list(k, v);
                             if (list.size() != 2) throw ConfigError(k + ": expected two numbers");
                             c.homotopy_shift = {list[0], list[1]};
                           },
                           [](const RunConfig& c) {
                             return join({c.homotopy_shift[0], c.homotopy_shift[1]});
                           }};
    t["kernel.lattice"] = flag(&RunConfig::kernel_lattice);
    t["kernel.fit_lo"] = number(&RunConfig::kernel_fit_lo);
    t["kernel.fit_hi"] = number(&RunConfig::kernel_fit_hi);
    t["cc.delta_lo"] = number(&RunConfig::cc_delta_lo);
    t["cc.delta_hi"] = number(&RunConfig::cc_delta_hi);
    t["distance.seed"] = number(&RunConfig::distance_seed);
    t["distance.every"] = number(&RunConfig::distance_every);
    t["verdict.monotone_tolerance"] = number(&RunConfig::monotone_tolerance);
    t["verdict.identity_constant"] = number(&RunConfig::identity_constant);
    t["verdict.convexity_constant"] = number(&RunConfig::convexity_constant);
    t["verdict.reeb_t0"] = number(&RunConfig::reeb_t0);
    t["verdict.reeb_constant"] = number(&RunConfig::reeb_constant);
    t["verdict.mass_tolerance"] = number(&RunConfig::mass_tolerance);
    t["verdict.energy_constant"] = number(&RunConfig::energy_constant);
    t["verdict.distance_constant"] = number(&RunConfig::distance_constant);
    return t;
  }();
  return table;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (std::count(key.begin(), key.end(), '.') > 1) throw ConfigError(where + "keys nest at most one level: " + key);
    if (c.has(key)) throw ConfigError(where + "duplicate key " + key);
    c.values_[key] = value;
  }
  return c;
}

Config Config::parse_string(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return parse(in, source);
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  if (path.extension() == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) throw ConfigError(path.string() + ": no config object");
    Config c;
    for (const auto& [k, v] : j["config"].items()) {
      if (!v.is_string()) throw ConfigError(path.string() + ": config value of " + k + " is not a string");
      c.values_[k] = v.get<std::string>();
    }
    return c;
  }
  return parse(in, path.string());
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key " + key);
  return it->second;
}

void Config::set(const std::string& key, std::string value) { values_[key] = std::move(value); }

std::string Config::text() const {
  std::string s;
  for (const auto& [k, v] : values_) s += k + " = " + v + "\n";
  return s;
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Heat: return "heat";
    case Scenario::Flow: return "flow";
    case Scenario::Picard: return "picard";
    case Scenario::Homotopy: return "homotopy";
    case Scenario::KernelProbe: return "kernel_probe";
    case Scenario::CcBall: return "cc_ball";
    case Scenario::DistanceMonotone: return "distance_monotone";
  }
  return "unknown";
}

double RunConfig::resolved_dt() const { return dt ? *dt : dt_max(Grid(grid_n)); }

Config RunConfig::to_config() const {
  Config c;
  for (const auto& [key, entry] : entries()) c.set(key, entry.write(*this));
  return c;
}

RunConfig make_run_config(const Config& config) {
  RunConfig rc;
  for (const auto& [key, value] : config.values()) {
    const auto it = entries().find(key);
    if (it == entries().end()) throw ConfigError("unknown key " + key);
    it->second.read(rc, key, value);
  }
  require(config.has("scenario"), "missing key scenario");
  require(rc.grid_n >= 8, "grid.n must be at least 8");

  static const std::vector<std::string> targets{"sphere2", "clifford", "euclidean", "poincare", "flat_torus"};
  require(std::find(targets.begin(), targets.end(), rc.target) != targets.end(),
          "target.name: unknown target '" + rc.target + "'");
  require(rc.euclidean_k >= 1 && rc.euclidean_k <= kMaxTargetDim, "target.k out of range");
  const Mode native = make_target(rc.target, rc.euclidean_k).mode();
  if (config.has("target.mode"))
    require(rc.mode == native, "target.mode: " + rc.target + " is " + to_string(native));
  rc.mode = native;

  if (rc.dt) {
    require(*rc.dt > 0.0, "time.dt must be positive");
    if (rc.integrator == Integrator::Explicit)
      require(*rc.dt <= dt_max(Grid(rc.grid_n)) * (1.0 + 1e-12),
              "time.dt = " + format_number(*rc.dt) + " exceeds the explicit stability bound h^2/10 = " +
                  format_number(dt_max(Grid(rc.grid_n))));
  }
  require(rc.stop.tau_tol_l2 > 0.0 && rc.stop.tau_tol_sup > 0.0, "stop tolerances must be positive");
  require(rc.stop.t_max > 0.0, "stop.t_max must be positive");
  require(rc.stop.plateau_window >= 1, "stop.plateau_window must be at least 1");
  require(rc.reproject_every >= 0, "flow.reproject_every must be nonnegative");
  require(rc.record_every >= 1, "flow.record_every must be at least 1");
  require(rc.amplitude >= 0.0, "initial.amplitude must be nonnegative");
  require(rc.max_mode >= 1, "initial.max_mode must be at least 1");

  switch (rc.scenario) {
    case Scenario::Heat:
      require(rc.heat_steps >= 1, "heat.steps must be at least 1");
      break;
    case Scenario::Picard:
      require(rc.mode == Mode::Extrinsic, "picard needs an embedded target");
      require(rc.picard_k_max >= 3, "picard.k_max must be at least 3");
      require(std::all_of(rc.picard_horizons.begin(), rc.picard_horizons.end(), [](double t) { return t > 0.0; }),
              "picard.horizons must be positive");
      require(std::is_sorted(rc.picard_horizons.begin(), rc.picard_horizons.end()),
              "picard.horizons must be increasing");
      require(rc.picard_compare_horizon >= 0.0, "picard.compare_horizon must be nonnegative");
      break;
    case Scenario::Homotopy:
      require(rc.homotopy_subdivisions >= 1, "homotopy.subdivisions must be at least 1");
      require(rc.target == "clifford", "homotopy runs on the clifford target");
      break;
    case Scenario::KernelProbe:
      require(rc.kernel_fit_lo > 0.0 && rc.kernel_fit_hi > rc.kernel_fit_lo, "kernel fit window must be increasing");
      break;
    case Scenario::CcBall:
      require(rc.cc_delta_lo > 0.0 && rc.cc_delta_hi > rc.cc_delta_lo, "cc.delta range must be increasing");
      break;
    case Scenario::DistanceMonotone:
      require(rc.distance_every >= 1, "distance.every must be at least 1");
      require(rc.distance_seed != rc.seed, "distance.seed must differ from run.seed");
      break;
    case Scenario::Flow:
      break;
  }
  return rc;
}

}  // namespace subrh
