#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "platoon/dcf.hpp"
#include "platoon/errors.hpp"
#include "platoon/rng.hpp"

using namespace platoon;

namespace {

const NetworkParams table_defaults{};

// Exhaustive sum over joint transmit/idle outcomes of every other vehicle.
double collision_by_enumeration(std::size_t lane, const WindowAssignment& a,
                                const std::vector<int>& counts) {
  std::vector<double> taus;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const double tau = dcf::transmission_probability(a.windows[j]);
    const int others = (j == lane) ? counts[j] - 1 : counts[j];
    for (int k = 0; k < others; ++k) taus.push_back(tau);
  }
  double collision = 0.0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << taus.size()); ++mask) {
    double prob = 1.0;
    for (std::size_t b = 0; b < taus.size(); ++b)
      prob *= (mask >> b & 1) ? taus[b] : 1.0 - taus[b];
    collision += prob;
  }
  return collision;
}

}  // namespace

TEST_CASE("transmission probability") {
  CHECK(dcf::transmission_probability(1) == 1.0);
  CHECK(dcf::transmission_probability(128) == 2.0 / 129.0);
  CHECK(dcf::transmission_probability(255) == 0.0078125);
  CHECK_THROWS_AS(dcf::transmission_probability(0), std::domain_error);

  for (int w = 2; w < 512; ++w)
    CHECK(dcf::transmission_probability(w) < dcf::transmission_probability(w - 1));
}

TEST_CASE("collision probability") {
  SUBCASE("no contenders") {
    WindowAssignment a{{128, 128}};
    CHECK(dcf::collision_probability(0, a, std::vector<int>{1, 0}) == 0.0);
  }
  SUBCASE("certain collision against an always-transmitting lane") {
    WindowAssignment a{{128, 1}};
    CHECK(dcf::collision_probability(0, a, std::vector<int>{1, 1}) == 1.0);
  }
  SUBCASE("two symmetric lanes") {
    WindowAssignment a{{128, 128}};
    CHECK(dcf::collision_probability(0, a, std::vector<int>{4, 4}) ==
          doctest::Approx(0.10360778812798987).epsilon(1e-12));
  }
  SUBCASE("errors") {
    WindowAssignment a{{128, 128}};
    CHECK_THROWS_AS(dcf::collision_probability(2, a, std::vector<int>{4, 4}),
                    std::out_of_range);
    CHECK_THROWS_AS(dcf::collision_probability(0, a, std::vector<int>{0, 4}),
                    std::invalid_argument);
    CHECK_THROWS_AS(dcf::collision_probability(0, a, std::vector<int>{4}),
                    std::invalid_argument);
  }
}

TEST_CASE("collision closed form equals exhaustive enumeration") {
  rng::Rng rng(87123);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t lanes = 1 + rng.below(3);
    WindowAssignment a;
    std::vector<int> counts;
    int total = 0;
    for (std::size_t j = 0; j < lanes; ++j) {
      a.windows.push_back(2 + static_cast<int>(rng.below(1023)));
      const int room = 10 - total - static_cast<int>(lanes - 1 - j);
      counts.push_back(1 + static_cast<int>(rng.below(
                               static_cast<std::uint64_t>(std::max(1, room)))));
      total += counts.back();
    }
    const std::size_t lane = rng.below(lanes);
    CHECK(dcf::collision_probability(lane, a, counts) ==
          doctest::Approx(collision_by_enumeration(lane, a, counts))
              .epsilon(1e-12));
  }
}

TEST_CASE("minimum window lower bound") {
  SUBCASE("single vehicle accepts the smallest legal window") {
    CHECK(dcf::min_window_lower_bound(std::vector<int>{1}, 0.24, 256) == 2);
    CHECK(dcf::min_window_lower_bound(std::vector<int>{1, 0}, 0.24, 256) == 2);
  }
  SUBCASE("loose cap accepts a tiny window") {
    // W = 2 still fails a 0.999 cap here: 1 - (1/3)^7 = 0.99954
    CHECK(dcf::min_window_lower_bound(std::vector<int>{4, 4}, 0.999, 256) == 3);
    CHECK(dcf::min_window_lower_bound(std::vector<int>{1, 1}, 0.999, 256) == 2);
  }
  SUBCASE("matches a linear scan on the reference counts") {
    const std::vector<int> counts{4, 4};
    int scanned = -1;
    for (int w = 2; w <= 256; ++w) {
      WindowAssignment uniform{{w, w}};
      const double worst =
          std::max(dcf::collision_probability(0, uniform, counts),
                   dcf::collision_probability(1, uniform, counts));
      if (worst <= 0.24) {
        scanned = w;
        break;
      }
    }
    CHECK(dcf::min_window_lower_bound(counts, 0.24, 256) == scanned);
    CHECK(scanned == 52);
  }
  SUBCASE("tight bound property") {
    rng::Rng rng(5150);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<int> counts{1 + static_cast<int>(rng.below(6)),
                              static_cast<int>(rng.below(6))};
      const double cap = rng.uniform(0.05, 0.6);
      const int bound = dcf::min_window_lower_bound(counts, cap, 4096);
      WindowAssignment at{{bound, bound}};
      for (std::size_t lane = 0; lane < counts.size(); ++lane)
        if (counts[lane] > 0)
          CHECK(dcf::collision_probability(lane, at, counts) <= cap);
      const int total = counts[0] + counts[1];
      if (bound > 2 && total > 1) {
        WindowAssignment below{{bound - 1, bound - 1}};
        double worst = 0.0;
        for (std::size_t lane = 0; lane < counts.size(); ++lane)
          if (counts[lane] > 0)
            worst = std::max(worst,
                             dcf::collision_probability(lane, below, counts));
        CHECK(worst > cap);
      }
    }
  }
  SUBCASE("infeasible cap") {
    CHECK_THROWS_AS(
        dcf::min_window_lower_bound(std::vector<int>{200, 200}, 0.01, 256),
        infeasible_error);
    try {
      dcf::min_window_lower_bound(std::vector<int>{200, 200}, 0.01, 256);
    } catch (const infeasible_error& e) {
      CHECK(e.best_violation() > 0.01);
    }
  }
  SUBCASE("argument errors") {
    CHECK_THROWS_AS(dcf::min_window_lower_bound(std::vector<int>{0}, 0.24, 256),
                    std::invalid_argument);
    CHECK_THROWS_AS(dcf::min_window_lower_bound(std::vector<int>{4}, 1.5, 256),
                    std::invalid_argument);
  }
}

TEST_CASE("back-off and service rates") {
  CHECK(dcf::backoff_rate(128, 50e-6) ==
        doctest::Approx(314.9606299212598).epsilon(1e-12));
  CHECK(dcf::backoff_rate(3, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dcf::backoff_rate(64, 50e-6) ==
        doctest::Approx(634.9206349206349).epsilon(1e-12));
  CHECK_THROWS_AS(dcf::backoff_rate(1, 50e-6), std::domain_error);

  CHECK(dcf::service_rate(8972e-6) ==
        doctest::Approx(111.45786892554614).epsilon(1e-12));
  CHECK(dcf::service_rate(1.0) == 1.0);
  CHECK(dcf::service_rate(2.0) == 0.5);
  CHECK_THROWS_AS(dcf::service_rate(0.0), std::domain_error);
  CHECK_THROWS_AS(dcf::service_rate(-1.0), std::domain_error);
}

TEST_CASE("per-vehicle transmission rate") {
  auto params = table_defaults;
  params.normalized_throughput = 0.8;
  params.channel_bitrate = 6e6;
  params.packet_bits = 4000.0;
  const double network_rate = 0.8 * 6e6 / 4000.0;

  SUBCASE("equal windows split the network rate evenly") {
    WindowAssignment a{{128, 128}};
    const std::vector<int> counts{3, 5};
    for (std::size_t lane = 0; lane < 2; ++lane)
      CHECK(dcf::per_vehicle_tx_rate(lane, a, counts, params) ==
            doctest::Approx(network_rate / 8.0).epsilon(1e-12));
  }
  SUBCASE("single vehicle takes the whole rate") {
    WindowAssignment a{{128}};
    auto single = params;
    single.lane_count = 1;
    CHECK(dcf::per_vehicle_tx_rate(0, a, std::vector<int>{1}, single) ==
          doctest::Approx(network_rate).epsilon(1e-12));
  }
  SUBCASE("asymmetric windows split by tau") {
    WindowAssignment a{{64, 256}};
    const std::vector<int> counts{1, 1};
    const double tau1 = 2.0 / 65.0, tau2 = 2.0 / 257.0;
    CHECK(dcf::per_vehicle_tx_rate(0, a, counts, params) ==
          doctest::Approx(network_rate * tau1 / (tau1 + tau2)).epsilon(1e-12));
    CHECK(dcf::per_vehicle_tx_rate(1, a, counts, params) ==
          doctest::Approx(network_rate * tau2 / (tau1 + tau2)).epsilon(1e-12));
  }
  SUBCASE("shares sum to the network rate") {
    WindowAssignment a{{78, 201}};
    const std::vector<int> counts{4, 3};
    double sum = 0.0;
    for (std::size_t lane = 0; lane < 2; ++lane)
      sum += counts[lane] * dcf::per_vehicle_tx_rate(lane, a, counts, params);
    CHECK(sum == doctest::Approx(network_rate).epsilon(1e-12));
  }
  SUBCASE("channel parameters are required") {
    WindowAssignment a{{128, 128}};
    CHECK_THROWS_AS(
        dcf::per_vehicle_tx_rate(0, a, std::vector<int>{4, 4}, table_defaults),
        std::invalid_argument);
  }
}

TEST_CASE("shs rate assembly") {
  WindowAssignment a{{128, 64}};
  const std::vector<int> counts{3, 4};
  const auto rates = dcf::make_shs_rates(a, counts, table_defaults);
  CHECK(rates.backoff_rates[0] == doctest::Approx(314.9606299212598));
  CHECK(rates.backoff_rates[1] == doctest::Approx(634.9206349206349));
  CHECK(rates.service_rates[0] == doctest::Approx(111.45786892554614));
  CHECK(rates.service_rates[1] == rates.service_rates[0]);
  CHECK(rates.lane_counts == counts);
  CHECK_THROWS_AS(dcf::make_shs_rates(a, std::vector<int>{3}, table_defaults),
                  std::invalid_argument);
}
