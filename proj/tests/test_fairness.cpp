#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "platoon/fairness.hpp"

using namespace platoon;

TEST_CASE("lane fairness index") {
  CHECK(fairness::lane_fairness_index(25.0, 128, 200.0) ==
        doctest::Approx(400.0 / 3225.0).epsilon(1e-15));
  CHECK(fairness::lane_fairness_index(20.0, 159, 200.0) ==
        doctest::Approx(0.125).epsilon(1e-15));
  CHECK_THROWS_AS(fairness::lane_fairness_index(0.0, 128, 200.0), std::domain_error);
  CHECK_THROWS_AS(fairness::lane_fairness_index(25.0, 0.5, 200.0), std::domain_error);
  CHECK_THROWS_AS(fairness::lane_fairness_index(25.0, 128, 0.0), std::domain_error);

  // doubling v while halving (W0 + 1) leaves the index unchanged
  const double base = fairness::lane_fairness_index(25.0, 128, 200.0);
  CHECK(fairness::lane_fairness_index(50.0, 129.0 / 2.0 - 1.0, 200.0) ==
        doctest::Approx(base).epsilon(1e-15));

  // strictly decreasing in velocity at a fixed window
  double previous = fairness::lane_fairness_index(20.0, 128, 200.0);
  for (double v = 20.5; v <= 30.0; v += 0.5) {
    const double index = fairness::lane_fairness_index(v, 128, 200.0);
    CHECK(index < previous);
    previous = index;
  }
}

TEST_CASE("network fairness index") {
  CHECK(fairness::network_fairness_index(25.0, 128, 200.0) ==
        doctest::Approx(400.0 / 3225.0).epsilon(1e-15));
  CHECK(fairness::network_fairness_index(24.5, 128, 200.0) ==
        doctest::Approx(400.0 / (24.5 * 129.0)).epsilon(1e-15));
  CHECK(fairness::network_fairness_index(25.0, 128, 200.0) ==
        fairness::lane_fairness_index(25.0, 128, 200.0));
}

TEST_CASE("fairness objectives") {
  SUBCASE("exact-balance windows give zero deviation") {
    // v_i * (W_i + 1) = 25 * 129 exactly at these integer windows
    NetworkParams params;
    const std::vector<LaneScenario> lanes{{25.8, 1.0}, {21.5, 1.0}};
    WindowAssignment a{{124, 149}};
    const auto objectives = fairness::fairness_objectives(lanes, a, params);
    REQUIRE(objectives.size() == 2);
    CHECK(objectives[0] <= 1e-15);
    CHECK(objectives[1] <= 1e-15);
  }
  SUBCASE("reference two-lane scenario at the standard window") {
    NetworkParams params;
    params.mean_velocity = 24.5;
    const std::vector<LaneScenario> lanes{{26.5, 1.0}, {22.5, 1.0}};
    WindowAssignment a{{128, 128}};
    const auto objectives = fairness::fairness_objectives(lanes, a, params);
    const double reference = 400.0 / (24.5 * 129.0);
    CHECK(objectives[0] ==
          doctest::Approx(std::abs(400.0 / (26.5 * 129.0) - reference))
              .epsilon(1e-15));
    CHECK(objectives[1] ==
          doctest::Approx(std::abs(400.0 / (22.5 * 129.0) - reference))
              .epsilon(1e-15));
  }
  SUBCASE("single lane at the reference point") {
    NetworkParams params;
    params.lane_count = 1;
    const std::vector<LaneScenario> lanes{{25.0, 1.0}};
    WindowAssignment a{{128}};
    const auto objectives = fairness::fairness_objectives(lanes, a, params);
    REQUIRE(objectives.size() == 1);
    CHECK(objectives[0] == 0.0);
  }
  SUBCASE("length mismatch") {
    NetworkParams params;
    const std::vector<LaneScenario> lanes{{26.5, 1.0}, {22.5, 1.0}};
    WindowAssignment a{{128}};
    CHECK_THROWS_AS(fairness::fairness_objectives(lanes, a, params),
                    std::invalid_argument);
  }
}

TEST_CASE("fairness report fields are consistent") {
  NetworkParams params;
  const std::vector<LaneScenario> lanes{{26.5, 1.0}, {22.5, 1.0}};
  WindowAssignment a{{117, 142}};
  const auto report = fairness::fairness_report(lanes, a, params);
  REQUIRE(report.lane_indices.size() == 2);
  REQUIRE(report.deviations.size() == 2);
  CHECK(report.network_index ==
        fairness::network_fairness_index(25.0, 128, 200.0));
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(report.deviations[i] ==
          std::abs(report.lane_indices[i] - report.network_index));
    CHECK(report.lane_indices[i] > 0.0);
  }
}
