#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "platoon/mopso.hpp"
#include "platoon/params.hpp"
#include "platoon/sim.hpp"

namespace platoon::cli {

/// Typed table cell: empty, integer, real or text. Integers and reals are
/// kept apart so CSV output parses back to the exact in-memory value.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column_index(const std::string& name) const;
  const Cell& at(std::size_t row, const std::string& column) const;
  bool operator==(const Table&) const = default;
};

/// Writes "# schema=1", a header row, then the data. Strings are always
/// quoted, numbers never, so parsing restores the cell types exactly.
void write_csv(const Table& table, std::ostream& out);
Table read_csv(std::istream& in);

/// Same content as JSON: {"schema": 1, "rows": [{column: value, ...}]}.
void write_json(const Table& table, std::ostream& out);

/// Everything a command needs: scenario, swarm settings, sweep grid,
/// simulation length and the master seed.
struct ExperimentSpec {
  NetworkParams params;
  std::vector<LaneScenario> lanes = {{26.5, 1.0}, {22.5, 1.0}};
  mopso::SwarmConfig swarm;

  // Sweep grid; the default covers every mean velocity for which both lanes
  // stay inside [v_min, v_max) at the configured gap.
  double vbar_min = 22.0;
  double vbar_max = 27.5;
  double vbar_step = 0.5;
  double gap = 4.0;
  std::vector<double> arrival_fractions = {1.0, 0.75};

  // Simulation settings.
  sim::SimConfig::Mode sim_mode = sim::SimConfig::Mode::snapshot;
  std::int64_t duration_slots = 2'000'000;
  std::vector<int> sim_windows;  // empty: mean_window on every lane

  std::uint64_t seed = 1;
  std::string format = "csv";  // csv | json
  bool emit_archive = false;
  std::string inject_fault;  // verify-only test hook

  void validate() const;  // throws config_error
};

/// Parses the flat key-value configuration format ("key = value" lines,
/// one "lane = velocity fraction" line per lane, '#' comments). Unknown
/// keys and malformed values raise config_error naming the field.
ExperimentSpec parse_config(std::istream& in);
ExperimentSpec load_config_file(const std::string& path);

/// Table builders behind the commands, exposed for tests.
Table run_optimize(const ExperimentSpec& spec);
Table run_sweep(const ExperimentSpec& spec);
Table run_simulate(const ExperimentSpec& spec);
Table run_pareto(const ExperimentSpec& spec);

/// Commands: emit the table (or check lines) on `out`, diagnostics on
/// `err`. Exit codes: 0 success, 1 infeasibility/check failure, 2 config.
int cmd_optimize(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);
int cmd_sweep(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);
int cmd_simulate(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);
int cmd_pareto(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);
int cmd_verify(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace platoon::cli
