#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "platoon/params.hpp"

namespace platoon::sim {

/// Slotted DCF simulation parameters. Two modes: `snapshot` runs a fixed
/// vehicle population to steady state; `traversal` moves platoons through
/// the coverage area and scores packets per completed pass.
struct SimConfig {
  enum class Mode { snapshot, traversal };
  Mode mode = Mode::snapshot;

  std::int64_t duration_slots = 2'000'000;
  std::vector<int> windows;         // one minimum contention window per lane
  std::vector<int> lane_counts;     // snapshot: fixed population per lane
  std::vector<LaneScenario> lanes;  // traversal: velocities + arrival fractions
  int tx_slots = 179;               // round(T_s / T_slot)
  double slot_time = 50e-6;         // seconds
  std::uint64_t seed = 1;

  enum class CollisionHandling { redraw_same_window };
  CollisionHandling collision_handling = CollisionHandling::redraw_same_window;

  /// Snapshot config for a window assignment over fixed lane counts.
  static SimConfig snapshot_of(const WindowAssignment& assignment,
                               std::span<const int> counts,
                               const NetworkParams& params,
                               std::int64_t duration_slots, std::uint64_t seed);

  /// Traversal config for a window assignment over moving lanes.
  static SimConfig traversal_of(const WindowAssignment& assignment,
                                std::span<const LaneScenario> lanes,
                                const NetworkParams& params,
                                std::int64_t duration_slots, std::uint64_t seed);
};

struct SimResult {
  // Snapshot ages (seconds), measured after the warm-up discard.
  std::vector<double> per_link_mean_age;
  double network_mean_age = 0.0;

  // Per-vehicle tallies over the whole run (snapshot mode).
  std::vector<std::int64_t> per_vehicle_success;
  std::vector<std::int64_t> per_vehicle_collisions;

  // Per-lane transmission probability at back-off decision epochs: slots in
  // which a vehicle's counter advanced or it began transmitting. The raw
  // tallies are exposed so callers can put error bars on the estimate.
  std::vector<double> empirical_tau;
  std::vector<std::int64_t> per_lane_tx_starts;
  std::vector<std::int64_t> per_lane_advances;

  // Slot bookkeeping: idle + tx_slots * (successes + collisions) == total.
  std::int64_t total_slots = 0;
  std::int64_t idle_slots = 0;
  std::int64_t success_count = 0;
  std::int64_t collision_count = 0;
  double channel_busy_fraction = 0.0;

  // Effective back-off rate per lane (transmissions over wall-clock waiting
  // time). Falls below 2/((W0-1)*T_slot) because frozen slots stretch the
  // wait; reported as a diagnostic of that gap.
  std::vector<double> effective_backoff_rate;

  // Traversal statistics.
  std::vector<double> per_lane_packets_mean;       // packets per completed pass
  std::vector<std::int64_t> per_lane_completed;    // completed passes

  std::vector<std::string> warnings;
};

/// Fixed-population slotted run. Back-off counters draw uniformly from
/// [0, W0-1], decrement once per idle slot and freeze while the channel is
/// busy; a sole transmitter occupies tx_slots slots and delivers (receiver
/// age resets to the service time), simultaneous transmitters collide and
/// redraw from the same window.
SimResult run_snapshot(const SimConfig& config);

/// Mobility run: vehicles enter on the deterministic platoon spacing of
/// their lane, contend while their headstock is inside coverage, and leave
/// at the far edge. Scores mean successful packets per completed traversal
/// for each lane.
SimResult run_traversal(const SimConfig& config, const NetworkParams& params);

}  // namespace platoon::sim
