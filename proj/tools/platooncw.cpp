#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>

#include "platoon/cli.hpp"
#include "platoon/errors.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string output_path;
  std::string format;
  std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Configuration file");
  cmd->add_option("--output", flags.output_path, "Output path (default stdout)");
  cmd->add_option("--format", flags.format, "Output format: csv or json");
  cmd->add_option("--seed", flags.seed, "Master RNG seed");
}

struct PsoFlags {
  bool stochastic = false;
  std::string inertia_schedule;
  std::string grid_mode;
};

void add_pso(CLI::App* cmd, PsoFlags& flags) {
  cmd->add_flag("--stochastic-pso", flags.stochastic,
                "Randomize the cognitive/social pulls per draw");
  cmd->add_option("--inertia-schedule", flags.inertia_schedule,
                  "constant or exponential")
      ->check(CLI::IsMember({"constant", "exponential"}));
  cmd->add_option("--grid-mode", flags.grid_mode,
                  "Archive grid resolution: eq49 (archive size) or meshdiv")
      ->check(CLI::IsMember({"eq49", "meshdiv"}));
}

void apply_flags(platoon::cli::ExperimentSpec& spec, const CommonFlags& common,
                 const PsoFlags& pso) {
  if (!common.format.empty()) spec.format = common.format;
  if (common.seed >= 0) spec.seed = static_cast<std::uint64_t>(common.seed);
  if (pso.stochastic) spec.swarm.stochastic_coefficients = true;
  if (pso.inertia_schedule == "constant")
    spec.swarm.inertia_schedule =
        platoon::mopso::SwarmConfig::InertiaSchedule::constant;
  else if (pso.inertia_schedule == "exponential")
    spec.swarm.inertia_schedule =
        platoon::mopso::SwarmConfig::InertiaSchedule::exponential_increase;
  if (pso.grid_mode == "eq49")
    spec.swarm.grid_mode = platoon::mopso::SwarmConfig::GridMode::archive_size;
  else if (pso.grid_mode == "meshdiv")
    spec.swarm.grid_mode = platoon::mopso::SwarmConfig::GridMode::mesh_div;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "platooncw: per-lane contention-window optimization for platoon V2I "
      "access, balancing access fairness against data freshness"};
  app.require_subcommand(1);

  CommonFlags common;
  PsoFlags pso;

  auto* optimize = app.add_subcommand(
      "optimize", "Optimal windows for one scenario");
  bool emit_archive = false;
  add_common(optimize, common);
  add_pso(optimize, pso);
  optimize->add_flag("--emit-archive", emit_archive,
                     "Emit the full non-dominated archive");

  auto* sweep = app.add_subcommand(
      "sweep", "Optimize across a mean-velocity grid");
  double vbar_min = -1.0, vbar_max = -1.0, vbar_step = -1.0, gap = -1.0;
  double arrival_fraction = -1.0;
  add_common(sweep, common);
  add_pso(sweep, pso);
  sweep->add_option("--vbar-min", vbar_min, "Lowest mean velocity (m/s)");
  sweep->add_option("--vbar-max", vbar_max, "Highest mean velocity (m/s)");
  sweep->add_option("--vbar-step", vbar_step, "Grid step (m/s)");
  sweep->add_option("--gap", gap, "Velocity gap between the two lanes (m/s)");
  sweep->add_option("--arrival-fraction", arrival_fraction,
                    "Single arrival fraction instead of {1.0, 0.75}");

  auto* simulate = app.add_subcommand(
      "simulate", "Slotted DCF simulation of one scenario");
  std::string sim_mode;
  std::int64_t duration_slots = -1;
  std::vector<int> windows;
  add_common(simulate, common);
  simulate->add_option("--sim-mode", sim_mode, "snapshot or traversal")
      ->check(CLI::IsMember({"snapshot", "traversal"}));
  simulate->add_option("--duration-slots", duration_slots, "Run length in slots");
  simulate->add_option("--window", windows, "Per-lane window (repeatable)");

  auto* verify = app.add_subcommand(
      "verify", "Run the oracle/property suite");
  std::string inject_fault;
  add_common(verify, common);
  verify->add_option("--inject-fault", inject_fault,
                     "Perturb the named check (negative control)");

  auto* pareto = app.add_subcommand(
      "pareto", "Emit the non-dominated archive for one scenario");
  add_common(pareto, common);
  add_pso(pareto, pso);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  platoon::cli::ExperimentSpec spec;
  try {
    if (!common.config_path.empty())
      spec = platoon::cli::load_config_file(common.config_path);
    apply_flags(spec, common, pso);
    if (emit_archive) spec.emit_archive = true;
    if (vbar_min >= 0.0) spec.vbar_min = vbar_min;
    if (vbar_max >= 0.0) spec.vbar_max = vbar_max;
    if (vbar_step > 0.0) spec.vbar_step = vbar_step;
    if (gap >= 0.0) spec.gap = gap;
    if (arrival_fraction > 0.0) spec.arrival_fractions = {arrival_fraction};
    if (!sim_mode.empty())
      spec.sim_mode = sim_mode == "traversal"
                          ? platoon::sim::SimConfig::Mode::traversal
                          : platoon::sim::SimConfig::Mode::snapshot;
    if (duration_slots > 0) spec.duration_slots = duration_slots;
    if (!windows.empty()) spec.sim_windows = windows;
    spec.inject_fault = inject_fault;
  } catch (const platoon::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!common.output_path.empty()) {
    file.open(common.output_path);
    if (!file) {
      std::cerr << "config error: cannot write '" << common.output_path
                << "'\n";
      return 2;
    }
    out = &file;
  }

  try {
    if (*optimize) return platoon::cli::cmd_optimize(spec, *out, std::cerr);
    if (*sweep) return platoon::cli::cmd_sweep(spec, *out, std::cerr);
    if (*simulate) return platoon::cli::cmd_simulate(spec, *out, std::cerr);
    if (*verify) return platoon::cli::cmd_verify(spec, *out, std::cerr);
    if (*pareto) return platoon::cli::cmd_pareto(spec, *out, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
