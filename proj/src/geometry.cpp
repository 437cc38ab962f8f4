#include "platoon/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace platoon::geom {

namespace {

// Counts are integers obtained from real-valued geometry; the band keeps
// 1.9999999987 from flooring to 1.
constexpr double kRoundTol = 1e-9;
constexpr double kRateTol = 1e-12;

int floor_count(double x) { return static_cast<int>(std::floor(x + kRoundTol)); }
int ceil_count(double x) { return static_cast<int>(std::ceil(x - kRoundTol)); }

}  // namespace

double intra_platoon_spacing(double velocity, const NetworkParams& params) {
  if (velocity < 0.0)
    throw std::domain_error("intra_platoon_spacing: negative velocity");
  const double ratio = velocity / params.v_max;
  const double under_root = 1.0 - ratio * ratio * ratio * ratio;
  if (under_root <= 0.0)
    throw std::domain_error(
        "intra_platoon_spacing: velocity at or above v_max");
  return (params.min_intra_spacing + velocity * params.time_headway) /
         std::sqrt(under_root);
}

double max_arrival_rate(double velocity, const NetworkParams& params) {
  if (velocity == 0.0) return 0.0;
  const double spacing = intra_platoon_spacing(velocity, params);
  return velocity / (params.platoon_size * (params.vehicle_length + spacing));
}

double inter_platoon_spacing(double velocity, double arrival_rate,
                             const NetworkParams& params) {
  if (!(arrival_rate > 0.0))
    throw std::domain_error("inter_platoon_spacing: arrival rate must be positive");
  const double rate_cap = max_arrival_rate(velocity, params);
  if (arrival_rate > rate_cap * (1.0 + kRateTol))
    throw std::domain_error(
        "inter_platoon_spacing: arrival rate exceeds the lane maximum");
  const double intra = intra_platoon_spacing(velocity, params);
  const double platoon_length =
      (params.platoon_size - 1) * (params.vehicle_length + intra) +
      params.vehicle_length;
  const double inter = velocity / arrival_rate - platoon_length;
  // At lambda_max the subtraction lands on r_w up to rounding; clamp so the
  // r_s >= r_w side condition holds exactly.
  return std::max(inter, intra);
}

LaneGeometry lane_geometry(const LaneScenario& lane,
                           const NetworkParams& params) {
  lane.validate(params);
  LaneGeometry g;
  g.intra_spacing = intra_platoon_spacing(lane.velocity, params);
  g.arrival_rate =
      lane.arrival_fraction * max_arrival_rate(lane.velocity, params);
  g.inter_spacing =
      inter_platoon_spacing(lane.velocity, g.arrival_rate, params);
  g.platoon_length =
      (params.platoon_size - 1) * (params.vehicle_length + g.intra_spacing) +
      params.vehicle_length;
  g.interval_length = g.platoon_length + g.inter_spacing;
  g.complete_platoons = floor_count(params.coverage_r / g.interval_length);
  g.complete_vehicles = g.complete_platoons * params.platoon_size;
  g.incomplete_length = std::max(
      0.0, params.coverage_r - g.complete_platoons * g.interval_length);
  const int partial = ceil_count(
      g.incomplete_length / (params.vehicle_length + g.intra_spacing));
  // A partial platoon can never hold more vehicles than a full one.
  g.incomplete_vehicles = std::clamp(partial, 0, params.platoon_size);
  g.total_vehicles = g.complete_vehicles + g.incomplete_vehicles;
  g.traversal_time = params.coverage_r / lane.velocity;
  return g;
}

int network_vehicle_count(std::span<const LaneGeometry> lanes) {
  if (lanes.empty())
    throw std::invalid_argument("network_vehicle_count: no lanes given");
  int total = 0;
  for (const auto& lane : lanes) total += lane.total_vehicles;
  return total;
}

std::vector<int> lane_counts(std::span<const LaneScenario> lanes,
                             const NetworkParams& params) {
  std::vector<int> counts;
  counts.reserve(lanes.size());
  for (const auto& lane : lanes)
    counts.push_back(lane_geometry(lane, params).total_vehicles);
  return counts;
}

}  // namespace platoon::geom
