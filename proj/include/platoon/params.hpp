#pragma once

#include <optional>
#include <vector>

namespace platoon {

/// Global constants of the highway/base-station scenario. Defaults describe
/// the reference two-lane setup: 200 m coverage, two-vehicle platoons,
/// 802.11 DCF timing and a contention-window range of 64..256.
struct NetworkParams {
  double coverage_r = 200.0;       // R, base station coverage (m)
  int lane_count = 2;              // N
  int platoon_size = 2;            // n_p, vehicles per complete platoon
  double vehicle_length = 5.0;     // s (m)
  double min_intra_spacing = 2.0;  // r_0 (m)
  double time_headway = 1.6;       // T_h (s)
  double v_max = 30.0;             // v_0, allowed maximum velocity (m/s)
  double v_min = 20.0;             // v_0', allowed minimum velocity (m/s)
  double mean_velocity = 25.0;     // v_bar, fairness reference velocity (m/s)
  int mean_window = 128;           // W_bar, fairness reference window
  double slot_time = 50e-6;        // T_slot (s)
  double tx_time = 8972e-6;        // T_s, successful transmission time (s)
  int window_lb = 64;              // smallest allowed minimum contention window
  int window_ub = 256;             // largest allowed minimum contention window
  double collision_cap = 0.24;     // p_UP, collision probability cap

  // Channel parameters, only needed for absolute per-vehicle rates.
  std::optional<double> channel_bitrate;        // C_bit (bit/s)
  std::optional<double> packet_bits;            // N_bit (bits per packet)
  std::optional<double> normalized_throughput;  // S, in (0, 1]

  /// Throws std::invalid_argument naming the first violated field.
  void validate() const;
};

/// Per-lane traffic state. Vehicles on a lane are homogeneous: one common
/// velocity, and a platoon arrival rate expressed as a fraction of the
/// lane's maximum (the rate at which inter- equals intra-platoon spacing).
struct LaneScenario {
  double velocity = 25.0;         // v_i (m/s)
  double arrival_fraction = 1.0;  // lambda_i / lambda_i^max, in (0, 1]

  void validate(const NetworkParams& params) const;
};

/// Decision variable: one minimum contention window per lane.
struct WindowAssignment {
  std::vector<int> windows;

  void validate(const NetworkParams& params) const;
};

}  // namespace platoon
