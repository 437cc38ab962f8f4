#pragma once

#include <span>
#include <vector>

#include "platoon/params.hpp"

namespace platoon::dcf {

/// Per-lane back-off and service rates plus vehicle counts; the input every
/// age formula consumes. Vehicles on a lane share one rate pair.
struct ShsRates {
  std::vector<double> backoff_rates;  // R_i (1/s)
  std::vector<double> service_rates;  // H_i (1/s)
  std::vector<int> lane_counts;       // n_i

  void validate() const;
};

/// Saturated, collision-free transmission probability tau = 2 / (W0 + 1).
double transmission_probability(int w0);

/// Probability that a transmission from `lane` overlaps at least one other
/// vehicle's transmission in the same slot:
///   p_i = 1 - (1 - tau_i)^(n_i - 1) * prod_{j != i} (1 - tau_j)^(n_j).
double collision_probability(std::size_t lane, const WindowAssignment& assignment,
                             std::span<const int> counts);

/// Smallest window W such that, with every lane at W, the collision
/// probability of every populated lane stays at or below p_up. Monotone
/// search over [2, window_ub]; throws infeasible_error when even window_ub
/// cannot meet the cap.
int min_window_lower_bound(std::span<const int> counts, double p_up,
                           int window_ub);

/// Back-off rate R = 2 / ((W0 - 1) * T_slot), the reciprocal of the mean
/// uniform draw from [0, W0 - 1]. Requires W0 >= 2.
double backoff_rate(int w0, double slot_time);

/// Service rate H = 1 / T_s.
double service_rate(double tx_time);

/// Per-vehicle transmission rate on `lane`:
///   C_s^i = S * (C_bit / N_bit) * tau_i / sum_over_all_vehicles(tau).
/// Requires the optional channel parameters to be configured.
double per_vehicle_tx_rate(std::size_t lane, const WindowAssignment& assignment,
                           std::span<const int> counts,
                           const NetworkParams& params);

/// Assembles the per-lane SHS rates from a window assignment and counts.
ShsRates make_shs_rates(const WindowAssignment& assignment,
                        std::span<const int> counts,
                        const NetworkParams& params);

}  // namespace platoon::dcf
