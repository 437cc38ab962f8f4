#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "platoon/cli.hpp"
#include "platoon/errors.hpp"

using namespace platoon;

namespace {

cli::Table sample_table() {
  cli::Table table;
  table.columns = {"name", "count", "ratio", "note"};
  table.rows.push_back({std::string("alpha"), std::int64_t{42}, 0.5,
                        std::string("plain")});
  table.rows.push_back({std::string("be,ta"), std::int64_t{-7}, 22.0,
                        std::string("has \"quotes\"")});
  table.rows.push_back({std::string("gamma"), std::monostate{}, 1e30,
                        std::string("")});
  table.rows.push_back({std::string("delta"), std::int64_t{0}, 0.1,
                        std::string("ok")});
  return table;
}

}  // namespace

TEST_CASE("csv output round-trips exactly") {
  const auto table = sample_table();
  std::ostringstream out;
  cli::write_csv(table, out);
  std::istringstream in(out.str());
  const auto parsed = cli::read_csv(in);
  CHECK(parsed == table);

  // emitting twice yields identical bytes
  std::ostringstream again;
  cli::write_csv(table, again);
  CHECK(out.str() == again.str());

  CHECK(out.str().rfind("# schema=1\n", 0) == 0);
}

TEST_CASE("json output is well-formed and mirrors columns") {
  const auto table = sample_table();
  std::ostringstream out;
  cli::write_json(table, out);
  const auto doc = nlohmann::json::parse(out.str());
  CHECK(doc.at("schema") == 1);
  CHECK(doc.at("columns").size() == 4);
  CHECK(doc.at("rows").size() == 4);
  CHECK(doc.at("rows")[0].at("name") == "alpha");
  CHECK(doc.at("rows")[0].at("count") == 42);
  CHECK(doc.at("rows")[2].at("count").is_null());
  CHECK(doc.at("rows")[1].at("ratio") == 22.0);
}

TEST_CASE("config parsing") {
  SUBCASE("empty input keeps the reference defaults") {
    std::istringstream in("");
    const auto spec = cli::parse_config(in);
    CHECK(spec.params.coverage_r == 200.0);
    CHECK(spec.params.mean_window == 128);
    CHECK(spec.params.window_lb == 64);
    CHECK(spec.params.window_ub == 256);
    CHECK(spec.params.slot_time == 50e-6);
    CHECK(spec.params.tx_time == 8972e-6);
    CHECK(spec.swarm.population == 200);
    CHECK(spec.swarm.iterations == 100);
    CHECK(spec.swarm.inertia == 0.8);
    CHECK(spec.swarm.cognitive == 0.9);
    CHECK(spec.swarm.social == 1.8);
    CHECK(spec.swarm.alpha == 3.0);
    CHECK(spec.swarm.k_bound == 0.005);
    REQUIRE(spec.lanes.size() == 2);
    CHECK(spec.lanes[0].velocity == 26.5);
    CHECK(spec.lanes[1].velocity == 22.5);
  }
  SUBCASE("keys and lanes are applied") {
    std::istringstream in(
        "# comment\n"
        "coverage_r = 300\n"
        "mean_velocity = 24.5\n"
        "lane = 27.0 0.75\n"
        "lane = 21.0\n"
        "population = 50\n"
        "seed = 9\n"
        "inertia_schedule = exponential\n"
        "stochastic_pso = true\n"
        "grid_mode = meshdiv\n");
    const auto spec = cli::parse_config(in);
    CHECK(spec.params.coverage_r == 300.0);
    CHECK(spec.params.mean_velocity == 24.5);
    REQUIRE(spec.lanes.size() == 2);
    CHECK(spec.params.lane_count == 2);
    CHECK(spec.lanes[0].arrival_fraction == 0.75);
    CHECK(spec.lanes[1].arrival_fraction == 1.0);
    CHECK(spec.swarm.population == 50);
    CHECK(spec.seed == 9);
    CHECK(spec.swarm.stochastic_coefficients);
    CHECK(spec.swarm.inertia_schedule ==
          mopso::SwarmConfig::InertiaSchedule::exponential_increase);
    CHECK(spec.swarm.grid_mode == mopso::SwarmConfig::GridMode::mesh_div);
  }
  SUBCASE("unknown keys and bad values name the field") {
    std::istringstream bad_key("coverge = 200\n");
    CHECK_THROWS_WITH_AS(cli::parse_config(bad_key),
                         doctest::Contains("coverge"), config_error);
    std::istringstream bad_value("coverage_r = wide\n");
    CHECK_THROWS_WITH_AS(cli::parse_config(bad_value),
                         doctest::Contains("coverage_r"), config_error);
    std::istringstream no_eq("coverage_r 200\n");
    CHECK_THROWS_AS(cli::parse_config(no_eq), config_error);
  }
}

TEST_CASE("sweep emits grid-ordered rows with error markers") {
  cli::ExperimentSpec spec;
  spec.vbar_min = 20.0;
  spec.vbar_max = 24.5;
  spec.vbar_step = 4.5;
  spec.arrival_fractions = {1.0};
  spec.swarm.population = 60;
  spec.swarm.iterations = 30;
  const auto table = cli::run_sweep(spec);

  REQUIRE(table.rows.size() == 4);  // two grid points, two lanes each
  // v_bar = 20 puts the slow lane at 18 m/s, outside the allowed range
  CHECK(std::get<std::string>(table.at(0, "status")).rfind("error:", 0) == 0);
  CHECK(std::holds_alternative<std::monostate>(table.at(0, "w0_opt")));
  // v_bar = 24.5 is fully inside the model's domain
  CHECK(std::get<std::string>(table.at(2, "status")) == "ok");
  CHECK(std::get<std::int64_t>(table.at(2, "n_v")) == 7);
  CHECK(std::get<double>(table.at(2, "r_w")) ==
        doctest::Approx(70.99080376718359).epsilon(1e-9));
  CHECK(std::get<std::int64_t>(table.at(2, "lane")) == 1);
  CHECK(std::get<std::int64_t>(table.at(3, "lane")) == 2);
  const double dev1 = std::abs(std::get<double>(table.at(2, "k_index_opt")) -
                               400.0 / 3225.0);
  const double dev2 = std::abs(std::get<double>(table.at(3, "k_index_opt")) -
                               400.0 / 3225.0);
  CHECK(dev1 <= spec.swarm.k_bound);
  CHECK(dev2 <= spec.swarm.k_bound);
}

TEST_CASE("sweep and optimize are deterministic") {
  cli::ExperimentSpec spec;
  spec.vbar_min = 24.5;
  spec.vbar_max = 24.5;
  spec.swarm.population = 60;
  spec.swarm.iterations = 30;
  CHECK(cli::run_sweep(spec) == cli::run_sweep(spec));
  CHECK(cli::run_optimize(spec) == cli::run_optimize(spec));

  std::ostringstream a, b;
  cli::write_csv(cli::run_sweep(spec), a);
  cli::write_csv(cli::run_sweep(spec), b);
  CHECK(a.str() == b.str());
}

TEST_CASE("pareto table properties") {
  cli::ExperimentSpec spec;
  spec.swarm.population = 80;
  spec.swarm.iterations = 40;
  const auto table = cli::run_pareto(spec);
  REQUIRE(table.rows.size() >= 3);

  const auto objective = [&](std::size_t row) {
    return std::vector<double>{std::get<double>(table.at(row, "f_k_1")),
                               std::get<double>(table.at(row, "f_k_2")),
                               std::get<double>(table.at(row, "f_age_s"))};
  };

  // mutually non-dominated
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < table.rows.size(); ++j) {
      if (i == j) continue;
      CHECK_FALSE(mopso::dominates(objective(i), objective(j)));
    }
  }

  // the flagged optimum satisfies the bounds with minimal age
  std::size_t selected = table.rows.size();
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    if (std::get<std::int64_t>(table.at(i, "selected")) == 1) selected = i;
  REQUIRE(selected < table.rows.size());
  const auto chosen = objective(selected);
  CHECK(chosen[0] <= spec.swarm.k_bound);
  CHECK(chosen[1] <= spec.swarm.k_bound);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto other = objective(i);
    if (other[0] <= spec.swarm.k_bound && other[1] <= spec.swarm.k_bound)
      CHECK(chosen[2] <= other[2] + 1e-15);
  }

  // the fairness/age trade-off shows up at the extremes
  double min_age = chosen[2], min_age_dev = std::max(chosen[0], chosen[1]);
  double best_dev = 1e9, best_dev_age = 0.0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto o = objective(i);
    const double dev = std::max(o[0], o[1]);
    if (o[2] < min_age) {
      min_age = o[2];
      min_age_dev = dev;
    }
    if (dev < best_dev) {
      best_dev = dev;
      best_dev_age = o[2];
    }
  }
  CHECK(min_age_dev > spec.swarm.k_bound);  // fastest ages sacrifice fairness
  CHECK(best_dev_age > min_age);            // fairest windows sacrifice age
}

TEST_CASE("verify command passes and honors fault injection") {
  cli::ExperimentSpec spec;
  std::ostringstream out, err;
  CHECK(cli::cmd_verify(spec, out, err) == 0);
  CHECK(out.str().find("[FAIL]") == std::string::npos);
  CHECK(out.str().find("[PASS] shs-oracle-equivalence") != std::string::npos);

  cli::ExperimentSpec faulty;
  faulty.inject_fault = "shs-oracle-equivalence";
  std::ostringstream out2, err2;
  CHECK(cli::cmd_verify(faulty, out2, err2) == 1);
  CHECK(out2.str().find("[FAIL] shs-oracle-equivalence") != std::string::npos);
}

TEST_CASE("optimize surfaces infeasibility with exit code 1") {
  cli::ExperimentSpec spec;
  spec.swarm.population = 40;
  spec.swarm.iterations = 10;
  spec.swarm.k_bound = 1e-9;
  std::ostringstream out, err;
  CHECK(cli::cmd_optimize(spec, out, err) == 1);
  CHECK(err.str().find("infeasible") != std::string::npos);
}

TEST_CASE("simulate emits lane and network rows") {
  cli::ExperimentSpec spec;
  spec.duration_slots = 200000;
  const auto table = cli::run_simulate(spec);
  REQUIRE(table.rows.size() == 3);
  CHECK(std::get<std::int64_t>(table.at(0, "lane")) == 1);
  CHECK(std::get<std::int64_t>(table.at(0, "window")) == 128);
  CHECK(std::get<double>(table.at(0, "empirical_tau")) > 0.0);
  CHECK(std::get<double>(table.at(2, "busy_fraction")) > 0.0);
  CHECK(std::get<std::int64_t>(table.at(2, "total_slots")) >= 200000);

  std::ostringstream csv;
  cli::write_csv(table, csv);
  std::istringstream back(csv.str());
  CHECK(cli::read_csv(back) == table);
}
