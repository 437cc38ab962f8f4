#include "platoon/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "platoon/geometry.hpp"
#include "platoon/rng.hpp"

namespace platoon::sim {

SimConfig SimConfig::snapshot_of(const WindowAssignment& assignment,
                                 std::span<const int> counts,
                                 const NetworkParams& params,
                                 std::int64_t duration_slots,
                                 std::uint64_t seed) {
  SimConfig config;
  config.mode = Mode::snapshot;
  config.windows = assignment.windows;
  config.lane_counts.assign(counts.begin(), counts.end());
  config.tx_slots =
      static_cast<int>(std::llround(params.tx_time / params.slot_time));
  config.slot_time = params.slot_time;
  config.duration_slots = duration_slots;
  config.seed = seed;
  return config;
}

SimConfig SimConfig::traversal_of(const WindowAssignment& assignment,
                                  std::span<const LaneScenario> lanes,
                                  const NetworkParams& params,
                                  std::int64_t duration_slots,
                                  std::uint64_t seed) {
  SimConfig config;
  config.mode = Mode::traversal;
  config.windows = assignment.windows;
  config.lanes.assign(lanes.begin(), lanes.end());
  config.tx_slots =
      static_cast<int>(std::llround(params.tx_time / params.slot_time));
  config.slot_time = params.slot_time;
  config.duration_slots = duration_slots;
  config.seed = seed;
  return config;
}

namespace {

struct Vehicle {
  int lane = 0;
  int window = 2;
  int counter = 0;
  bool transmitting = false;
  bool partial = false;       // already inside coverage at t = 0
  std::int64_t successes = 0;
  std::int64_t collisions = 0;
  double exit_time = std::numeric_limits<double>::infinity();
};

void check_common(const SimConfig& config, std::size_t lanes) {
  if (config.windows.size() != lanes || lanes == 0)
    throw std::invalid_argument("sim: one window per lane required");
  for (int w : config.windows)
    if (w < 1) throw std::invalid_argument("sim: window must be >= 1");
  if (config.tx_slots < 1)
    throw std::invalid_argument("sim: tx_slots must be >= 1");
  if (config.duration_slots < 10)
    throw std::invalid_argument("sim: duration too short");
  if (!(config.slot_time > 0.0))
    throw std::invalid_argument("sim: slot time must be positive");
}

}  // namespace

SimResult run_snapshot(const SimConfig& config) {
  check_common(config, config.lane_counts.size());
  std::int64_t population = 0;
  for (int n : config.lane_counts) {
    if (n < 0) throw std::invalid_argument("run_snapshot: negative lane count");
    population += n;
  }
  if (population < 1)
    throw std::invalid_argument("run_snapshot: empty population");

  SimResult result;
  if (config.duration_slots < 10'000LL * config.tx_slots)
    result.warnings.push_back(
        "duration_slots below 10^4 * tx_slots; steady-state averages may be noisy");

  const std::size_t lanes = config.lane_counts.size();
  rng::Rng rng(config.seed);
  std::vector<Vehicle> vehicles;
  vehicles.reserve(static_cast<std::size_t>(population));
  for (std::size_t i = 0; i < lanes; ++i) {
    for (int k = 0; k < config.lane_counts[i]; ++k) {
      Vehicle v;
      v.lane = static_cast<int>(i);
      v.window = config.windows[i];
      v.counter = static_cast<int>(rng.below(static_cast<std::uint64_t>(v.window)));
      vehicles.push_back(v);
    }
  }

  const double dt = config.slot_time;
  const std::int64_t warmup = config.duration_slots / 10;
  std::vector<double> age(vehicles.size(), 0.0);
  std::vector<double> age_integral(vehicles.size(), 0.0);
  std::vector<std::int64_t> lane_advances(lanes, 0);
  std::vector<std::int64_t> lane_tx_starts(lanes, 0);
  std::vector<double> lane_wait(lanes, 0.0);

  std::vector<std::size_t> txers;
  std::int64_t busy_remaining = 0;
  std::int64_t t = 0;

  while (t < config.duration_slots || busy_remaining > 0) {
    const bool measured = t >= warmup;
    for (std::size_t v = 0; v < vehicles.size(); ++v) {
      if (measured) age_integral[v] += (age[v] + 0.5 * dt) * dt;
      age[v] += dt;
    }

    // Contention: transmissions begin in this slot and occupy it, so the
    // busy countdown below covers the start slot too.
    if (busy_remaining == 0) {
      for (std::size_t v = 0; v < vehicles.size(); ++v)
        if (vehicles[v].counter == 0) txers.push_back(v);
      if (txers.empty()) {
        ++result.idle_slots;
        for (std::size_t v = 0; v < vehicles.size(); ++v) {
          --vehicles[v].counter;
          ++lane_advances[vehicles[v].lane];
        }
      } else {
        busy_remaining = config.tx_slots;
        for (std::size_t idx : txers) {
          vehicles[idx].transmitting = true;
          ++lane_tx_starts[vehicles[idx].lane];
          ++lane_advances[vehicles[idx].lane];
        }
      }
    }

    for (std::size_t i = 0; i < lanes; ++i)
      lane_wait[i] += config.lane_counts[i] * dt;
    for (std::size_t v : txers) lane_wait[vehicles[v].lane] -= dt;

    if (busy_remaining > 0 && --busy_remaining == 0) {
      if (txers.size() == 1) {
        Vehicle& v = vehicles[txers.front()];
        // the packet was generated at capture, so it arrives aged by the
        // service duration
        age[txers.front()] = config.tx_slots * dt;
        ++v.successes;
        ++result.success_count;
      } else {
        ++result.collision_count;
        for (std::size_t idx : txers) ++vehicles[idx].collisions;
      }
      for (std::size_t idx : txers) {
        Vehicle& v = vehicles[idx];
        v.transmitting = false;
        v.counter =
            static_cast<int>(rng.below(static_cast<std::uint64_t>(v.window)));
      }
      txers.clear();
    }
    ++t;
  }

  result.total_slots = t;
  result.channel_busy_fraction =
      static_cast<double>(config.tx_slots *
                          (result.success_count + result.collision_count)) /
      static_cast<double>(t);

  const double measured_seconds = static_cast<double>(t - warmup) * dt;
  result.per_link_mean_age.resize(vehicles.size());
  double age_sum = 0.0;
  for (std::size_t v = 0; v < vehicles.size(); ++v) {
    result.per_link_mean_age[v] = age_integral[v] / measured_seconds;
    age_sum += result.per_link_mean_age[v];
  }
  result.network_mean_age = age_sum / static_cast<double>(vehicles.size());

  result.per_vehicle_success.reserve(vehicles.size());
  result.per_vehicle_collisions.reserve(vehicles.size());
  for (const Vehicle& v : vehicles) {
    result.per_vehicle_success.push_back(v.successes);
    result.per_vehicle_collisions.push_back(v.collisions);
  }

  result.empirical_tau.resize(lanes, 0.0);
  result.effective_backoff_rate.resize(lanes, 0.0);
  result.per_lane_tx_starts = lane_tx_starts;
  result.per_lane_advances = lane_advances;
  for (std::size_t i = 0; i < lanes; ++i) {
    if (lane_advances[i] > 0)
      result.empirical_tau[i] = static_cast<double>(lane_tx_starts[i]) /
                                static_cast<double>(lane_advances[i]);
    if (lane_wait[i] > 0.0)
      result.effective_backoff_rate[i] =
          static_cast<double>(lane_tx_starts[i]) / lane_wait[i];
  }
  return result;
}

SimResult run_traversal(const SimConfig& config, const NetworkParams& params) {
  check_common(config, config.lanes.size());
  params.validate();
  const std::size_t lanes = config.lanes.size();

  SimResult result;

  // Deterministic platoon pattern per lane: member m of platoon j crosses
  // the near edge at (j * D_w + m * (s + r_w)) / v.
  std::vector<double> interval(lanes), member_gap(lanes), residence(lanes);
  for (std::size_t i = 0; i < lanes; ++i) {
    const auto g = geom::lane_geometry(config.lanes[i], params);
    interval[i] = g.interval_length;
    member_gap[i] = params.vehicle_length + g.intra_spacing;
    residence[i] = params.coverage_r / config.lanes[i].velocity;
  }

  const double dt = config.slot_time;
  rng::Rng rng(config.seed);
  std::vector<Vehicle> vehicles;
  std::vector<std::size_t> active;

  const auto spawn = [&](std::size_t lane, double entry_time, bool partial) {
    Vehicle v;
    v.lane = static_cast<int>(lane);
    v.window = config.windows[lane];
    v.counter = static_cast<int>(rng.below(static_cast<std::uint64_t>(v.window)));
    v.partial = partial;
    v.exit_time = entry_time + residence[lane];
    active.push_back(vehicles.size());
    vehicles.push_back(v);
  };

  // Prefill: platoons whose members are already inside coverage at t = 0.
  for (std::size_t i = 0; i < lanes; ++i) {
    const double v = config.lanes[i].velocity;
    for (long j = -1;; --j) {
      bool any_inside = false;
      for (int m = 0; m < params.platoon_size; ++m) {
        const double entry = (j * interval[i] + m * member_gap[i]) / v;
        if (entry > -residence[i] && entry <= 0.0) {
          spawn(i, entry, true);
          any_inside = true;
        }
      }
      if (!any_inside) break;
    }
  }

  // Future arrivals, generated lazily per lane in time order.
  std::vector<long> next_platoon(lanes, 0);
  std::vector<int> next_member(lanes, 0);
  const auto next_arrival = [&](std::size_t i) {
    return (next_platoon[i] * interval[i] +
            next_member[i] * member_gap[i]) /
           config.lanes[i].velocity;
  };

  std::vector<std::int64_t> lane_advances(lanes, 0);
  std::vector<std::int64_t> lane_tx_starts(lanes, 0);
  std::vector<double> lane_wait(lanes, 0.0);
  std::vector<std::int64_t> lane_completed(lanes, 0);
  std::vector<std::int64_t> lane_packets(lanes, 0);
  std::vector<std::int64_t> lane_population(lanes, 0);
  for (std::size_t idx : active) ++lane_population[vehicles[idx].lane];

  const auto retire = [&](std::size_t idx) {
    Vehicle& v = vehicles[idx];
    if (!v.partial) {
      ++lane_completed[v.lane];
      lane_packets[v.lane] += v.successes;
    }
    --lane_population[v.lane];
    active.erase(std::find(active.begin(), active.end(), idx));
  };

  std::vector<std::size_t> txers;
  std::int64_t busy_remaining = 0;
  std::int64_t t = 0;

  while (t < config.duration_slots || busy_remaining > 0) {
    const double now = static_cast<double>(t) * dt;

    if (t < config.duration_slots) {
      for (std::size_t i = 0; i < lanes; ++i) {
        while (next_arrival(i) <= now) {
          spawn(i, next_arrival(i), false);
          ++lane_population[i];
          if (++next_member[i] == params.platoon_size) {
            next_member[i] = 0;
            ++next_platoon[i];
          }
        }
      }
    }

    // Departures; a transmitting vehicle finishes its slot occupancy first.
    for (std::size_t k = 0; k < active.size();) {
      const std::size_t idx = active[k];
      if (now >= vehicles[idx].exit_time && !vehicles[idx].transmitting)
        retire(idx);
      else
        ++k;
    }

    if (busy_remaining == 0) {
      for (std::size_t idx : active)
        if (vehicles[idx].counter == 0) txers.push_back(idx);
      if (txers.empty()) {
        ++result.idle_slots;
        for (std::size_t idx : active) {
          --vehicles[idx].counter;
          ++lane_advances[vehicles[idx].lane];
        }
      } else {
        busy_remaining = config.tx_slots;
        for (std::size_t idx : txers) {
          vehicles[idx].transmitting = true;
          ++lane_tx_starts[vehicles[idx].lane];
          ++lane_advances[vehicles[idx].lane];
        }
      }
    }

    for (std::size_t i = 0; i < lanes; ++i)
      lane_wait[i] += static_cast<double>(lane_population[i]) * dt;
    for (std::size_t idx : txers) lane_wait[vehicles[idx].lane] -= dt;

    if (busy_remaining > 0 && --busy_remaining == 0) {
      if (txers.size() == 1) {
        ++vehicles[txers.front()].successes;
        ++result.success_count;
      } else {
        ++result.collision_count;
        for (std::size_t idx : txers) ++vehicles[idx].collisions;
      }
      for (std::size_t idx : txers) {
        Vehicle& v = vehicles[idx];
        v.transmitting = false;
        v.counter =
            static_cast<int>(rng.below(static_cast<std::uint64_t>(v.window)));
      }
      txers.clear();
    }
    ++t;
  }

  result.total_slots = t;
  result.channel_busy_fraction =
      static_cast<double>(config.tx_slots *
                          (result.success_count + result.collision_count)) /
      static_cast<double>(t);

  result.empirical_tau.resize(lanes, 0.0);
  result.effective_backoff_rate.resize(lanes, 0.0);
  result.per_lane_tx_starts = lane_tx_starts;
  result.per_lane_advances = lane_advances;
  result.per_lane_packets_mean.resize(lanes, 0.0);
  result.per_lane_completed.resize(lanes, 0);
  for (std::size_t i = 0; i < lanes; ++i) {
    if (lane_advances[i] > 0)
      result.empirical_tau[i] = static_cast<double>(lane_tx_starts[i]) /
                                static_cast<double>(lane_advances[i]);
    if (lane_wait[i] > 0.0)
      result.effective_backoff_rate[i] =
          static_cast<double>(lane_tx_starts[i]) / lane_wait[i];
    result.per_lane_completed[i] = lane_completed[i];
    if (lane_completed[i] > 0)
      result.per_lane_packets_mean[i] =
          static_cast<double>(lane_packets[i]) /
          static_cast<double>(lane_completed[i]);
    else
      result.warnings.push_back("lane " + std::to_string(i + 1) +
                                ": no completed traversals in the horizon");
  }
  return result;
}

}  // namespace platoon::sim
