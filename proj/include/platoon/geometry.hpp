#pragma once

#include <span>
#include <vector>

#include "platoon/params.hpp"

namespace platoon::geom {

/// Everything the steady-state layout of one lane determines: spacings,
/// platoon interval, vehicle counts inside coverage, arrival rate and
/// traversal time. Produced by lane_geometry().
struct LaneGeometry {
  double intra_spacing = 0.0;     // r_w (m)
  double inter_spacing = 0.0;     // r_s (m)
  double platoon_length = 0.0;    // d_w, headstock-to-tail of one platoon (m)
  double interval_length = 0.0;   // D_w = d_w + r_s (m)
  int complete_platoons = 0;      // m_i
  double incomplete_length = 0.0; // D_s = R - m_i * D_w (m)
  int complete_vehicles = 0;      // n_w = m_i * n_p
  int incomplete_vehicles = 0;    // n_s
  int total_vehicles = 0;         // n_i = n_w + n_s
  double arrival_rate = 0.0;      // lambda_i (platoons/s)
  double traversal_time = 0.0;    // T_i = R / v_i (s)
};

/// Velocity-dependent intra-platoon spacing
///   r_w(v) = (r_0 + v * T_h) / sqrt(1 - (v / v_0)^4),
/// strictly increasing on [0, v_0). Throws std::domain_error at v >= v_0
/// where the denominator vanishes.
double intra_platoon_spacing(double velocity, const NetworkParams& params);

/// Largest feasible platoon arrival rate, reached when the inter-platoon
/// spacing shrinks to the intra-platoon spacing:
///   lambda_max(v) = v / (n_p * (s + r_w(v))).
double max_arrival_rate(double velocity, const NetworkParams& params);

/// Inter-platoon spacing consistent with a given arrival rate:
///   r_s = v / lambda - [(n_p - 1)(s + r_w) + s].
/// Requires lambda <= lambda_max(v); the result never falls below r_w.
double inter_platoon_spacing(double velocity, double arrival_rate,
                             const NetworkParams& params);

/// Full steady-state layout of one lane. The complete-platoon count is the
/// rounded-down ratio R / D_w; the incomplete-platoon vehicle count is the
/// rounded-up ratio D_s / (s + r_w), capped at n_p.
LaneGeometry lane_geometry(const LaneScenario& lane,
                           const NetworkParams& params);

/// Total vehicles in the network, summed over lanes. Throws on empty input.
int network_vehicle_count(std::span<const LaneGeometry> lanes);

/// Convenience: per-lane vehicle counts for a whole scenario.
std::vector<int> lane_counts(std::span<const LaneScenario> lanes,
                             const NetworkParams& params);

}  // namespace platoon::geom
