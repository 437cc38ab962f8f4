#include "platoon/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "platoon/aoi.hpp"
#include "platoon/dcf.hpp"
#include "platoon/errors.hpp"
#include "platoon/fairness.hpp"
#include "platoon/geometry.hpp"
#include "platoon/rng.hpp"

namespace platoon::cli {

namespace {

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, res.ptr);
  // keep a decimal marker so the value reads back as a real, not an integer
  if (s.find_first_of(".eEin") == std::string::npos) s += ".0";
  return s;
}

std::string format_cell(const Cell& cell) {
  if (std::holds_alternative<std::monostate>(cell)) return {};
  if (std::holds_alternative<std::int64_t>(cell))
    return std::to_string(std::get<std::int64_t>(cell));
  if (std::holds_alternative<double>(cell))
    return format_double(std::get<double>(cell));
  // strings are always quoted; numbers never are
  std::string quoted = "\"";
  for (char c : std::get<std::string>(cell)) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

Cell classify_cell(const std::string& text, bool quoted) {
  if (quoted) return text;
  if (text.empty()) return std::monostate{};
  std::int64_t integer = 0;
  auto [iptr, iec] =
      std::from_chars(text.data(), text.data() + text.size(), integer);
  if (iec == std::errc{} && iptr == text.data() + text.size()) return integer;
  double real = 0.0;
  auto [dptr, dec] =
      std::from_chars(text.data(), text.data() + text.size(), real);
  if (dec == std::errc{} && dptr == text.data() + text.size()) return real;
  return text;
}

std::vector<std::pair<std::string, bool>> split_csv_line(const std::string& line) {
  std::vector<std::pair<std::string, bool>> cells;
  std::string current;
  bool quoted = false, in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      in_quotes = true;
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back(std::move(current), quoted);
      current.clear();
      quoted = false;
    } else {
      current += c;
    }
  }
  cells.emplace_back(std::move(current), quoted);
  return cells;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double_field(const std::string& key, const std::string& value) {
  double out = 0.0;
  auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw config_error(key, "expected a number, got '" + value + "'");
  return out;
}

std::int64_t parse_int_field(const std::string& key, const std::string& value) {
  std::int64_t out = 0;
  auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw config_error(key, "expected an integer, got '" + value + "'");
  return out;
}

bool parse_bool_field(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw config_error(key, "expected true/false, got '" + value + "'");
}

std::vector<std::string> split_words(const std::string& value) {
  std::vector<std::string> words;
  std::istringstream stream(value);
  std::string word;
  while (stream >> word) words.push_back(word);
  return words;
}

}  // namespace

std::size_t Table::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end())
    throw std::out_of_range("Table: no column named " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

const Cell& Table::at(std::size_t row, const std::string& column) const {
  return rows.at(row).at(column_index(column));
}

void write_csv(const Table& table, std::ostream& out) {
  out << "# schema=1\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
}

Table read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "# schema=1")
    throw std::invalid_argument("read_csv: missing '# schema=1' header");
  Table table;
  if (!std::getline(in, line))
    throw std::invalid_argument("read_csv: missing column header");
  for (auto& [text, quoted] : split_csv_line(line)) table.columns.push_back(text);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<Cell> row;
    for (auto& [text, quoted] : split_csv_line(line))
      row.push_back(classify_cell(text, quoted));
    if (row.size() != table.columns.size())
      throw std::invalid_argument("read_csv: ragged row");
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_json(const Table& table, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["schema"] = 1;
  doc["columns"] = table.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string& key = table.columns[i];
      if (std::holds_alternative<std::monostate>(row[i]))
        obj[key] = nullptr;
      else if (std::holds_alternative<std::int64_t>(row[i]))
        obj[key] = std::get<std::int64_t>(row[i]);
      else if (std::holds_alternative<double>(row[i]))
        obj[key] = std::get<double>(row[i]);
      else
        obj[key] = std::get<std::string>(row[i]);
    }
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << '\n';
}

void ExperimentSpec::validate() const {
  params.validate();
  if (lanes.empty()) throw config_error("lane", "at least one lane required");
  if (lanes.size() != static_cast<std::size_t>(params.lane_count))
    throw config_error("lane", "lane entries must match lane_count");
  for (const auto& lane : lanes) lane.validate(params);
  swarm.validate();
  if (!(vbar_step > 0.0)) throw config_error("vbar_step", "must be positive");
  if (vbar_min > vbar_max)
    throw config_error("vbar_min", "must not exceed vbar_max");
  if (gap < 0.0) throw config_error("gap", "must be non-negative");
  if (arrival_fractions.empty())
    throw config_error("arrival_fractions", "at least one fraction required");
  for (double f : arrival_fractions)
    if (!(f > 0.0 && f <= 1.0))
      throw config_error("arrival_fractions", "fractions must lie in (0, 1]");
  if (duration_slots < 10)
    throw config_error("duration_slots", "too short to simulate");
  if (!sim_windows.empty() && sim_windows.size() != lanes.size())
    throw config_error("windows", "one window per lane required");
  if (format != "csv" && format != "json")
    throw config_error("format", "must be csv or json");
}

ExperimentSpec parse_config(std::istream& in) {
  ExperimentSpec spec;
  std::vector<LaneScenario> lanes;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(line_no),
                         "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw config_error("line " + std::to_string(line_no),
                         "expected 'key = value'");

    if (key == "lane") {
      const auto words = split_words(value);
      if (words.empty() || words.size() > 2)
        throw config_error(key, "expected 'lane = velocity [fraction]'");
      LaneScenario lane;
      lane.velocity = parse_double_field(key, words[0]);
      if (words.size() == 2)
        lane.arrival_fraction = parse_double_field(key, words[1]);
      lanes.push_back(lane);
    } else if (key == "coverage_r") {
      spec.params.coverage_r = parse_double_field(key, value);
    } else if (key == "platoon_size") {
      spec.params.platoon_size = static_cast<int>(parse_int_field(key, value));
    } else if (key == "vehicle_length") {
      spec.params.vehicle_length = parse_double_field(key, value);
    } else if (key == "min_intra_spacing") {
      spec.params.min_intra_spacing = parse_double_field(key, value);
    } else if (key == "time_headway") {
      spec.params.time_headway = parse_double_field(key, value);
    } else if (key == "v_max") {
      spec.params.v_max = parse_double_field(key, value);
    } else if (key == "v_min") {
      spec.params.v_min = parse_double_field(key, value);
    } else if (key == "mean_velocity") {
      spec.params.mean_velocity = parse_double_field(key, value);
    } else if (key == "mean_window") {
      spec.params.mean_window = static_cast<int>(parse_int_field(key, value));
    } else if (key == "slot_time") {
      spec.params.slot_time = parse_double_field(key, value);
    } else if (key == "tx_time") {
      spec.params.tx_time = parse_double_field(key, value);
    } else if (key == "window_lb") {
      spec.params.window_lb = static_cast<int>(parse_int_field(key, value));
    } else if (key == "window_ub") {
      spec.params.window_ub = static_cast<int>(parse_int_field(key, value));
    } else if (key == "collision_cap") {
      spec.params.collision_cap = parse_double_field(key, value);
    } else if (key == "channel_bitrate") {
      spec.params.channel_bitrate = parse_double_field(key, value);
    } else if (key == "packet_bits") {
      spec.params.packet_bits = parse_double_field(key, value);
    } else if (key == "normalized_throughput") {
      spec.params.normalized_throughput = parse_double_field(key, value);
    } else if (key == "population") {
      spec.swarm.population = static_cast<int>(parse_int_field(key, value));
    } else if (key == "iterations") {
      spec.swarm.iterations = static_cast<int>(parse_int_field(key, value));
    } else if (key == "inertia") {
      spec.swarm.inertia = parse_double_field(key, value);
    } else if (key == "inertia_cap") {
      spec.swarm.inertia_cap = parse_double_field(key, value);
    } else if (key == "cognitive") {
      spec.swarm.cognitive = parse_double_field(key, value);
    } else if (key == "social") {
      spec.swarm.social = parse_double_field(key, value);
    } else if (key == "mesh_div") {
      spec.swarm.mesh_div = static_cast<int>(parse_int_field(key, value));
    } else if (key == "alpha") {
      spec.swarm.alpha = parse_double_field(key, value);
    } else if (key == "k_bound") {
      spec.swarm.k_bound = parse_double_field(key, value);
    } else if (key == "pso_v_min") {
      spec.swarm.velocity_min = parse_double_field(key, value);
    } else if (key == "pso_v_max") {
      spec.swarm.velocity_max = parse_double_field(key, value);
    } else if (key == "archive_cap_factor") {
      spec.swarm.archive_cap_factor =
          static_cast<int>(parse_int_field(key, value));
    } else if (key == "position_update") {
      if (value == "gated")
        spec.swarm.position_update =
            mopso::SwarmConfig::PositionUpdate::dominance_gated;
      else if (value == "non_dominated")
        spec.swarm.position_update =
            mopso::SwarmConfig::PositionUpdate::non_dominated;
      else
        throw config_error(key, "expected gated or non_dominated");
    } else if (key == "inertia_schedule") {
      if (value == "constant")
        spec.swarm.inertia_schedule = mopso::SwarmConfig::InertiaSchedule::constant;
      else if (value == "exponential")
        spec.swarm.inertia_schedule =
            mopso::SwarmConfig::InertiaSchedule::exponential_increase;
      else
        throw config_error(key, "expected constant or exponential");
    } else if (key == "stochastic_pso") {
      spec.swarm.stochastic_coefficients = parse_bool_field(key, value);
    } else if (key == "grid_mode") {
      if (value == "eq49")
        spec.swarm.grid_mode = mopso::SwarmConfig::GridMode::archive_size;
      else if (value == "meshdiv")
        spec.swarm.grid_mode = mopso::SwarmConfig::GridMode::mesh_div;
      else
        throw config_error(key, "expected eq49 or meshdiv");
    } else if (key == "vbar_min") {
      spec.vbar_min = parse_double_field(key, value);
    } else if (key == "vbar_max") {
      spec.vbar_max = parse_double_field(key, value);
    } else if (key == "vbar_step") {
      spec.vbar_step = parse_double_field(key, value);
    } else if (key == "gap") {
      spec.gap = parse_double_field(key, value);
    } else if (key == "arrival_fractions") {
      spec.arrival_fractions.clear();
      for (const auto& word : split_words(value))
        spec.arrival_fractions.push_back(parse_double_field(key, word));
    } else if (key == "sim_mode") {
      if (value == "snapshot")
        spec.sim_mode = sim::SimConfig::Mode::snapshot;
      else if (value == "traversal")
        spec.sim_mode = sim::SimConfig::Mode::traversal;
      else
        throw config_error(key, "expected snapshot or traversal");
    } else if (key == "duration_slots") {
      spec.duration_slots = parse_int_field(key, value);
    } else if (key == "windows") {
      spec.sim_windows.clear();
      for (const auto& word : split_words(value))
        spec.sim_windows.push_back(static_cast<int>(parse_int_field(key, word)));
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_int_field(key, value));
    } else if (key == "format") {
      spec.format = value;
    } else {
      throw config_error(key, "unknown configuration key (line " +
                                  std::to_string(line_no) + ")");
    }
  }
  if (!lanes.empty()) {
    spec.lanes = std::move(lanes);
    spec.params.lane_count = static_cast<int>(spec.lanes.size());
  }
  return spec;
}

ExperimentSpec load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config", "cannot open '" + path + "'");
  return parse_config(in);
}

namespace {

Table archive_table(const mopso::RunResult& result, std::size_t lane_count) {
  Table table;
  for (std::size_t i = 0; i < lane_count; ++i)
    table.columns.push_back("w0_" + std::to_string(i + 1));
  for (std::size_t i = 0; i < lane_count; ++i)
    table.columns.push_back("f_k_" + std::to_string(i + 1));
  table.columns.push_back("f_age_s");
  table.columns.push_back("selected");

  std::vector<const mopso::ArchiveMember*> members;
  members.reserve(result.archive.members.size());
  for (const auto& member : result.archive.members) members.push_back(&member);
  std::sort(members.begin(), members.end(),
            [](const mopso::ArchiveMember* a, const mopso::ArchiveMember* b) {
              if (a->objective.back() != b->objective.back())
                return a->objective.back() < b->objective.back();
              return a->position < b->position;
            });

  for (const auto* member : members) {
    std::vector<Cell> row;
    bool selected = true;
    for (std::size_t i = 0; i < lane_count; ++i) {
      const auto w = static_cast<std::int64_t>(std::llround(member->position[i]));
      row.emplace_back(w);
      if (w != result.optimal.windows[i]) selected = false;
    }
    for (std::size_t i = 0; i < lane_count; ++i)
      row.emplace_back(member->objective[i]);
    row.emplace_back(member->objective.back());
    row.emplace_back(static_cast<std::int64_t>(selected ? 1 : 0));
    table.rows.push_back(std::move(row));
  }
  return table;
}

int emit(const Table& table, const ExperimentSpec& spec, std::ostream& out) {
  if (spec.format == "json")
    write_json(table, out);
  else
    write_csv(table, out);
  return 0;
}

}  // namespace

Table run_optimize(const ExperimentSpec& spec) {
  spec.validate();
  auto params = spec.params;
  auto swarm = spec.swarm;
  swarm.seed = spec.seed;
  const auto result = mopso::run(spec.lanes, params, swarm);
  if (spec.emit_archive) return archive_table(result, spec.lanes.size());

  const auto report =
      fairness::fairness_report(spec.lanes, result.optimal, params);
  Table table;
  table.columns = {"lane",     "velocity_mps", "arrival_fraction",
                   "w0_opt",   "k_index",      "fairness_deviation",
                   "f_age_s",  "archive_size"};
  for (std::size_t i = 0; i < spec.lanes.size(); ++i) {
    table.rows.push_back(
        {static_cast<std::int64_t>(i + 1), spec.lanes[i].velocity,
         spec.lanes[i].arrival_fraction,
         static_cast<std::int64_t>(result.optimal.windows[i]),
         report.lane_indices[i], report.deviations[i],
         result.optimal_objective.back(),
         static_cast<std::int64_t>(result.archive.members.size())});
  }
  return table;
}

Table run_pareto(const ExperimentSpec& spec) {
  spec.validate();
  auto swarm = spec.swarm;
  swarm.seed = spec.seed;
  const auto result = mopso::run(spec.lanes, spec.params, swarm);
  return archive_table(result, spec.lanes.size());
}

Table run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  Table table;
  table.columns = {"v_bar",  "lane",      "arrival_fraction", "w0_opt",
                   "k_index_opt", "k_index_standard", "r_w",  "r_s",
                   "lambda", "n_i",       "n_v",              "age_opt_s",
                   "age_std_s",   "status"};

  const int points = static_cast<int>(
      std::floor((spec.vbar_max - spec.vbar_min) / spec.vbar_step + 1e-9)) + 1;
  std::uint64_t point_index = 0;
  for (int k = 0; k < points; ++k) {
    const double vbar = spec.vbar_min + k * spec.vbar_step;
    for (double fraction : spec.arrival_fractions) {
      std::vector<LaneScenario> lanes = {
          {vbar + spec.gap / 2.0, fraction},
          {vbar - spec.gap / 2.0, fraction},
      };
      auto params = spec.params;
      params.lane_count = 2;
      try {
        for (const auto& lane : lanes) lane.validate(params);
        std::vector<geom::LaneGeometry> geoms;
        std::vector<int> counts;
        for (const auto& lane : lanes) {
          geoms.push_back(geom::lane_geometry(lane, params));
          counts.push_back(geoms.back().total_vehicles);
        }
        const int n_v = geom::network_vehicle_count(geoms);

        auto swarm = spec.swarm;
        swarm.seed = spec.seed ^ point_index;
        const auto result = mopso::run(lanes, params, swarm);

        WindowAssignment standard;
        standard.windows.assign(lanes.size(), params.mean_window);
        const auto report_opt =
            fairness::fairness_report(lanes, result.optimal, params);
        const auto report_std =
            fairness::fairness_report(lanes, standard, params);
        const double age_opt = result.optimal_objective.back();
        const double age_std =
            aoi::network_average_age(
                dcf::make_shs_rates(standard, counts, params))
                .network_age;

        for (std::size_t i = 0; i < lanes.size(); ++i) {
          table.rows.push_back(
              {vbar, static_cast<std::int64_t>(i + 1), fraction,
               static_cast<std::int64_t>(result.optimal.windows[i]),
               report_opt.lane_indices[i], report_std.lane_indices[i],
               geoms[i].intra_spacing, geoms[i].inter_spacing,
               geoms[i].arrival_rate,
               static_cast<std::int64_t>(geoms[i].total_vehicles),
               static_cast<std::int64_t>(n_v), age_opt, age_std,
               std::string("ok")});
        }
      } catch (const std::exception& e) {
        for (std::size_t i = 0; i < lanes.size(); ++i) {
          table.rows.push_back({vbar, static_cast<std::int64_t>(i + 1),
                                fraction, std::monostate{}, std::monostate{},
                                std::monostate{}, std::monostate{},
                                std::monostate{}, std::monostate{},
                                std::monostate{}, std::monostate{},
                                std::monostate{}, std::monostate{},
                                std::string("error: ") + e.what()});
        }
      }
      ++point_index;
    }
  }
  return table;
}

Table run_simulate(const ExperimentSpec& spec) {
  spec.validate();
  const auto& params = spec.params;
  WindowAssignment assignment;
  assignment.windows = spec.sim_windows.empty()
                           ? std::vector<int>(spec.lanes.size(), params.mean_window)
                           : spec.sim_windows;
  const auto counts = geom::lane_counts(spec.lanes, params);

  sim::SimResult result;
  if (spec.sim_mode == sim::SimConfig::Mode::snapshot) {
    result = sim::run_snapshot(sim::SimConfig::snapshot_of(
        assignment, counts, params, spec.duration_slots, spec.seed));
  } else {
    result = sim::run_traversal(
        sim::SimConfig::traversal_of(assignment, spec.lanes, params,
                                     spec.duration_slots, spec.seed),
        params);
  }

  const auto rates = dcf::make_shs_rates(assignment, counts, params);
  const auto age_model = aoi::network_average_age(rates);

  Table table;
  table.columns = {"lane",
                   "window",
                   "vehicles",
                   "empirical_tau",
                   "tau_model",
                   "mean_age_s",
                   "age_model_s",
                   "packets_per_traversal",
                   "completed_traversals",
                   "eff_backoff_rate",
                   "backoff_rate_model",
                   "network_age_s",
                   "network_age_model_s",
                   "busy_fraction",
                   "total_slots",
                   "idle_slots",
                   "successes",
                   "collisions"};

  std::size_t link_offset = 0;
  for (std::size_t i = 0; i < spec.lanes.size(); ++i) {
    std::vector<Cell> row(table.columns.size(), std::monostate{});
    row[0] = static_cast<std::int64_t>(i + 1);
    row[1] = static_cast<std::int64_t>(assignment.windows[i]);
    row[2] = static_cast<std::int64_t>(counts[i]);
    if (i < result.empirical_tau.size()) row[3] = result.empirical_tau[i];
    row[4] = dcf::transmission_probability(assignment.windows[i]);
    if (spec.sim_mode == sim::SimConfig::Mode::snapshot) {
      double lane_age = 0.0;
      for (int k = 0; k < counts[i]; ++k)
        lane_age += result.per_link_mean_age[link_offset + k];
      if (counts[i] > 0) row[5] = lane_age / counts[i];
      link_offset += static_cast<std::size_t>(counts[i]);
    }
    row[6] = age_model.per_lane_age[i];
    if (spec.sim_mode == sim::SimConfig::Mode::traversal) {
      row[7] = result.per_lane_packets_mean[i];
      row[8] = result.per_lane_completed[i];
    }
    if (i < result.effective_backoff_rate.size())
      row[9] = result.effective_backoff_rate[i];
    row[10] = rates.backoff_rates[i];
    table.rows.push_back(std::move(row));
  }

  std::vector<Cell> net(table.columns.size(), std::monostate{});
  if (spec.sim_mode == sim::SimConfig::Mode::snapshot)
    net[11] = result.network_mean_age;
  net[12] = age_model.network_age;
  net[13] = result.channel_busy_fraction;
  net[14] = result.total_slots;
  net[15] = result.idle_slots;
  net[16] = result.success_count;
  net[17] = result.collision_count;
  table.rows.push_back(std::move(net));
  return table;
}

int cmd_optimize(const ExperimentSpec& spec, std::ostream& out,
                 std::ostream& err) {
  try {
    return emit(run_optimize(spec), spec, out);
  } catch (const infeasible_error& e) {
    err << "infeasible: " << e.what()
        << " (best fairness-bound violation " << format_double(e.best_violation())
        << ")\n";
    return 1;
  } catch (const config_error& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
}

int cmd_sweep(const ExperimentSpec& spec, std::ostream& out,
              std::ostream& err) {
  try {
    return emit(run_sweep(spec), spec, out);
  } catch (const config_error& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
}

int cmd_simulate(const ExperimentSpec& spec, std::ostream& out,
                 std::ostream& err) {
  try {
    const auto table = run_simulate(spec);
    return emit(table, spec, out);
  } catch (const config_error& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
}

int cmd_pareto(const ExperimentSpec& spec, std::ostream& out,
               std::ostream& err) {
  try {
    return emit(run_pareto(spec), spec, out);
  } catch (const infeasible_error& e) {
    err << "infeasible: " << e.what()
        << " (best fairness-bound violation " << format_double(e.best_violation())
        << ")\n";
    return 1;
  } catch (const config_error& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
}

// ---------------------------------------------------------------------------
// verify: property suite cross-checking the closed forms against their
// independent oracles. Each check prints one pass/fail line.

namespace {

struct Check {
  std::string name;
  std::function<std::pair<bool, std::string>(bool fault)> fn;
};

aoi::ShsInstance random_instance(rng::Rng& rng, std::size_t max_links) {
  aoi::ShsInstance instance;
  const auto links = 1 + rng.below(max_links);
  for (std::size_t k = 0; k < links; ++k) {
    instance.backoff_rates.push_back(
        std::exp(rng.uniform(std::log(0.1), std::log(1000.0))));
    instance.service_rates.push_back(
        std::exp(rng.uniform(std::log(0.1), std::log(1000.0))));
  }
  return instance;
}

double collision_by_enumeration(std::size_t lane,
                                const WindowAssignment& assignment,
                                std::span<const int> counts) {
  // Exhaustive sum over the joint transmit/idle outcomes of every other
  // vehicle in one slot.
  std::vector<double> tau_others;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const double tau = dcf::transmission_probability(assignment.windows[j]);
    const int others = (j == lane) ? counts[j] - 1 : counts[j];
    for (int k = 0; k < others; ++k) tau_others.push_back(tau);
  }
  double collision = 0.0;
  const std::size_t outcomes = std::size_t{1} << tau_others.size();
  for (std::size_t mask = 1; mask < outcomes; ++mask) {
    double prob = 1.0;
    for (std::size_t b = 0; b < tau_others.size(); ++b)
      prob *= (mask >> b & 1) ? tau_others[b] : 1.0 - tau_others[b];
    collision += prob;
  }
  return collision;
}

void enumerate_fixed_sum(int slots, int remaining, int minimum,
                         std::vector<int>& current,
                         const std::function<void(const std::vector<int>&)>& visit) {
  if (slots == 1) {
    if (remaining >= minimum) {
      current.push_back(remaining);
      visit(current);
      current.pop_back();
    }
    return;
  }
  for (int w = minimum; w <= remaining - minimum * (slots - 1); ++w) {
    current.push_back(w);
    enumerate_fixed_sum(slots - 1, remaining - w, minimum, current, visit);
    current.pop_back();
  }
}

}  // namespace

int cmd_verify(const ExperimentSpec& spec, std::ostream& out,
               std::ostream& err) {
  try {
    spec.validate();
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }

  std::vector<Check> checks;

  checks.push_back({"shs-oracle-equivalence", [&](bool fault) {
    rng::Rng rng(spec.seed);
    double worst = 0.0;
    for (int i = 0; i < 60; ++i) {
      const auto instance = random_instance(rng, 6);
      const auto oracle = aoi::markov_oracle(instance);
      for (std::size_t k = 0; k < instance.link_count(); ++k) {
        const double closed =
            aoi::link_age(instance, k) + (fault ? 1e-6 : 0.0);
        worst = std::max(worst, std::abs(closed - oracle[k]) / oracle[k]);
      }
    }
    return std::make_pair(worst <= 1e-9,
                          "max relative gap " + format_double(worst) +
                              " over 60 random instances");
  }});

  checks.push_back({"shs-balance-steady-state", [&](bool fault) {
    rng::Rng rng(spec.seed + 1);
    double worst = 0.0;
    for (int i = 0; i < 40; ++i) {
      const auto instance = random_instance(rng, 6);
      const auto numeric = aoi::balance_probs(instance);
      const auto closed = aoi::steady_state_probs(instance);
      for (std::size_t q = 0; q < numeric.size(); ++q)
        worst = std::max(worst,
                         std::abs(numeric[q] - closed[q] + (fault ? 1e-6 : 0.0)));
    }
    return std::make_pair(worst <= 1e-12,
                          "max probability gap " + format_double(worst));
  }});

  checks.push_back({"shs-oracle-internals", [&](bool fault) {
    rng::Rng rng(spec.seed + 2);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const auto instance = random_instance(rng, 5);
      for (std::size_t k = 0; k < instance.link_count(); ++k) {
        const auto solve = aoi::oracle_link_solve(instance, k);
        worst = std::max(worst, std::abs(solve.link_corr[0]));
        const double expected = 1.0 / instance.backoff_rates[k];
        worst = std::max(worst, std::abs(solve.receiver_corr[0] - expected) /
                                    expected +
                                    (fault ? 1e-6 : 0.0));
      }
    }
    return std::make_pair(worst <= 1e-9,
                          "idle-state correlations off by at most " +
                              format_double(worst));
  }});

  checks.push_back({"collision-enumeration", [&](bool fault) {
    rng::Rng rng(spec.seed + 3);
    double worst = 0.0;
    for (int i = 0; i < 40; ++i) {
      const auto lanes = 1 + rng.below(3);
      WindowAssignment assignment;
      std::vector<int> counts;
      int total = 0;
      for (std::size_t j = 0; j < lanes; ++j) {
        assignment.windows.push_back(2 + static_cast<int>(rng.below(1023)));
        const int room = 10 - total - static_cast<int>(lanes - 1 - j);
        const int n = 1 + static_cast<int>(rng.below(
                              static_cast<std::uint64_t>(std::max(1, room))));
        counts.push_back(n);
        total += n;
      }
      const std::size_t lane = rng.below(lanes);
      const double closed =
          dcf::collision_probability(lane, assignment, counts) +
          (fault ? 1e-6 : 0.0);
      const double enumerated =
          collision_by_enumeration(lane, assignment, counts);
      worst = std::max(worst, std::abs(closed - enumerated));
    }
    return std::make_pair(worst <= 1e-12,
                          "max closed-vs-enumeration gap " +
                              format_double(worst));
  }});

  checks.push_back({"fairness-lemma1", [&](bool fault) {
    rng::Rng rng(spec.seed + 4);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double coverage = rng.uniform(50.0, 500.0);
      const double mean_velocity = rng.uniform(20.0, 30.0);
      const double mean_window = 64.0 + rng.below(193);
      const double target = mean_velocity * (mean_window + 1.0);
      for (int lane = 0; lane < 3; ++lane) {
        const double velocity = rng.uniform(20.0, 30.0);
        const double window = target / velocity - 1.0;
        const double dev =
            std::abs(fairness::lane_fairness_index(velocity, window, coverage) -
                     fairness::network_fairness_index(mean_velocity, mean_window,
                                                      coverage)) +
            (fault ? 1e-6 : 0.0);
        worst = std::max(worst, dev);
      }
    }
    return std::make_pair(worst < 1e-12,
                          "max deviation " + format_double(worst) +
                              " at exact-balance windows");
  }});

  checks.push_back({"age-lemma2", [&](bool fault) {
    const double slot = 50e-6, service = 111.0;
    bool ok = true;
    double margin = 0.0;
    for (int links = 1; links <= 3 && ok; ++links) {
      for (int mean = 2; mean <= 10 && ok; ++mean) {
        const std::vector<int> equal(links, mean);
        const double floor_age =
            aoi::symmetric_age(service, equal, slot) + (fault ? 1e-6 : 0.0);
        std::vector<int> current;
        enumerate_fixed_sum(links, links * mean, 2, current,
                            [&](const std::vector<int>& windows) {
                              const double age =
                                  aoi::symmetric_age(service, windows, slot);
                              margin = std::min(margin, age - floor_age);
                              if (age < floor_age - 1e-12) ok = false;
                            });
      }
    }
    return std::make_pair(ok,
                          "equal windows minimal; worst slack " +
                              format_double(margin));
  }});

  checks.push_back({"spot-values", [&](bool fault) {
    const double bump = fault ? 1e-6 : 0.0;
    NetworkParams params;
    bool ok = true;
    std::string detail;
    const double tau = dcf::transmission_probability(128) + bump;
    if (tau != 2.0 / 129.0) { ok = false; detail = "tau(128)"; }
    const double spacing = geom::intra_platoon_spacing(25.0, params) + bump;
    if (std::abs(spacing - 58.3701) > 1e-3) { ok = false; detail = "r_w(25)"; }
    dcf::ShsRates rates{{2.0, 2.0}, {1.0, 1.0}, {1, 1}};
    const double age = aoi::network_average_age(rates).network_age + bump;
    if (std::abs(age - 3.3) > 1e-12) { ok = false; detail = "symmetric age"; }
    const auto g = geom::lane_geometry({25.0, 1.0}, params);
    if (g.complete_platoons != 1 || g.total_vehicles != 4 ||
        std::abs(g.interval_length - 126.7402) > 1e-3)
      { ok = false; detail = "lane geometry at 25 m/s"; }
    return std::make_pair(ok, ok ? std::string("analytic spot values hold")
                                 : "mismatch at " + detail);
  }});

  checks.push_back({"geometry-roundtrip", [&](bool fault) {
    NetworkParams params;
    double worst = 0.0;
    for (double v = 20.0; v <= 29.5; v += 0.25) {
      const double intra = geom::intra_platoon_spacing(v, params);
      const double inter = geom::inter_platoon_spacing(
          v, geom::max_arrival_rate(v, params), params);
      worst = std::max(worst, std::abs(inter - intra) / intra +
                                  (fault ? 1e-6 : 0.0));
    }
    return std::make_pair(worst <= 1e-9,
                          "max |r_s - r_w| / r_w at lambda_max " +
                              format_double(worst));
  }});

  checks.push_back({"window-bound-tightness", [&](bool fault) {
    rng::Rng rng(spec.seed + 5);
    bool ok = true;
    std::string detail = "bound tight on every sampled count vector";
    for (int i = 0; i < 20 && ok; ++i) {
      std::vector<int> counts;
      const auto lanes = 1 + rng.below(3);
      for (std::size_t j = 0; j < lanes; ++j)
        counts.push_back(static_cast<int>(rng.below(7)));
      if (std::accumulate(counts.begin(), counts.end(), 0) == 0)
        counts[0] = 1;
      const double cap = rng.uniform(0.05, 0.6);
      const int bound = dcf::min_window_lower_bound(counts, cap, 4096) +
                        (fault ? 1 : 0);
      WindowAssignment at_bound, below_bound;
      at_bound.windows.assign(counts.size(), bound);
      below_bound.windows.assign(counts.size(), bound - 1);
      for (std::size_t lane = 0; lane < counts.size(); ++lane) {
        if (counts[lane] < 1) continue;
        if (dcf::collision_probability(lane, at_bound, counts) > cap) {
          ok = false;
          detail = "returned window misses the cap";
        }
      }
      if (bound > 2) {
        double worst_below = 0.0;
        for (std::size_t lane = 0; lane < counts.size(); ++lane) {
          if (counts[lane] < 1) continue;
          worst_below = std::max(
              worst_below,
              dcf::collision_probability(lane, below_bound, counts));
        }
        const int total =
            std::accumulate(counts.begin(), counts.end(), 0);
        if (total > 1 && worst_below <= cap) {
          ok = false;
          detail = "a smaller window also meets the cap";
        }
      }
    }
    return std::make_pair(ok, detail);
  }});

  bool all_ok = true;
  for (const auto& check : checks) {
    const bool fault = spec.inject_fault == check.name;
    const auto [ok, detail] = check.fn(fault);
    out << (ok ? "[PASS] " : "[FAIL] ") << check.name << ": " << detail
        << '\n';
    if (!ok) all_ok = false;
  }
  return all_ok ? 0 : 1;
}

}  // namespace platoon::cli
