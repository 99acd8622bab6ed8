#include <iostream>

#include <CLI11.hpp>

#include "subrh/config.hpp"
#include "subrh/plots.hpp"
#include "subrh/runner.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out, const std::string& seed, int grid,
                const std::string& scenario) {
  subrh::RunConfig rc;
  try {
    subrh::Config config = subrh::Config::load(config_path);
    if (!out.empty()) config.set("run.out_dir", out);
    if (!seed.empty()) config.set("run.seed", seed);
    if (grid > 0) config.set("grid.n", std::to_string(grid));
    if (!scenario.empty()) config.set("scenario", scenario);
    rc = subrh::make_run_config(config);
  } catch (const subrh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  subrh::RunOutcome outcome;
  try {
    outcome = subrh::run(rc);
  } catch (const subrh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return 1;
  }
  for (const auto& v : outcome.verdicts)
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << " slack=" << v.slack << " tol=" << v.tolerance << '\n';
  if (!outcome.error.empty()) std::cerr << "aborted: " << outcome.error << '\n';

  try {
    subrh::emit_plots(rc.out_dir / "records.csv", rc.out_dir / "plots");
  } catch (const std::exception& e) {
    std::cerr << "plots skipped: " << e.what() << '\n';
  }
  return outcome.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-harmonic map heat flow on the Heisenberg nilmanifold"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario from a key=value config (or a run manifest)");
  std::string config_path, out, seed, scenario;
  int grid = 0;
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out, "Output directory (overrides run.out_dir)");
  run->add_option("--seed", seed, "RNG seed (overrides run.seed)");
  run->add_option("--grid", grid, "Grid size N (overrides grid.n)")->check(CLI::PositiveNumber);
  run->add_option("--scenario", scenario, "Scenario (overrides scenario)");

  auto* plots = app.add_subcommand("plots", "Write gnuplot scripts for a records.csv");
  std::string records, plot_dir;
  plots->add_option("--records", records, "records.csv")->required();
  plots->add_option("--out", plot_dir, "Directory for the scripts (default: plots/ next to the records)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) return run_command(config_path, out, seed, grid, scenario);

  try {
    const std::filesystem::path rec(records);
    const auto dir = plot_dir.empty() ? rec.parent_path() / "plots" : std::filesystem::path(plot_dir);
    for (const auto& p : subrh::emit_plots(rec, dir)) std::cout << p.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "plots: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
