#include "platoon/params.hpp"

#include <stdexcept>
#include <string>

namespace platoon {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw std::invalid_argument(field + ": " + why);
}

}  // namespace

void NetworkParams::validate() const {
  if (!(coverage_r > 0.0)) fail("coverage_r", "must be positive");
  if (lane_count < 1) fail("lane_count", "must be at least 1");
  if (platoon_size < 1) fail("platoon_size", "must be at least 1");
  if (!(vehicle_length > 0.0)) fail("vehicle_length", "must be positive");
  if (!(min_intra_spacing > 0.0)) fail("min_intra_spacing", "must be positive");
  if (!(time_headway >= 0.0)) fail("time_headway", "must be non-negative");
  if (!(v_min > 0.0)) fail("v_min", "must be positive");
  if (!(v_min < v_max)) fail("v_min", "must be below v_max");
  if (!(mean_velocity > 0.0)) fail("mean_velocity", "must be positive");
  if (mean_window < 1) fail("mean_window", "must be at least 1");
  if (!(slot_time > 0.0)) fail("slot_time", "must be positive");
  if (!(tx_time > slot_time)) fail("tx_time", "must exceed slot_time");
  if (window_lb < 2) fail("window_lb", "must be at least 2");
  if (window_lb > window_ub) fail("window_lb", "must not exceed window_ub");
  if (!(collision_cap > 0.0 && collision_cap < 1.0))
    fail("collision_cap", "must lie in (0, 1)");
  if (channel_bitrate && !(*channel_bitrate > 0.0))
    fail("channel_bitrate", "must be positive");
  if (packet_bits && !(*packet_bits > 0.0))
    fail("packet_bits", "must be positive");
  if (normalized_throughput &&
      !(*normalized_throughput > 0.0 && *normalized_throughput <= 1.0))
    fail("normalized_throughput", "must lie in (0, 1]");
}

void LaneScenario::validate(const NetworkParams& params) const {
  if (!(velocity >= params.v_min && velocity <= params.v_max))
    fail("velocity", "outside the allowed range [v_min, v_max]");
  if (!(arrival_fraction > 0.0 && arrival_fraction <= 1.0))
    fail("arrival_fraction", "must lie in (0, 1]");
}

void WindowAssignment::validate(const NetworkParams& params) const {
  if (windows.size() != static_cast<std::size_t>(params.lane_count))
    fail("windows", "one window per lane required");
  for (int w : windows) {
    if (w < params.window_lb || w > params.window_ub)
      fail("windows", "window " + std::to_string(w) +
                          " outside [window_lb, window_ub]");
  }
}

}  // namespace platoon
