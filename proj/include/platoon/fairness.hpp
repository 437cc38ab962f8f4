#pragma once

#include <span>
#include <vector>

#include "platoon/params.hpp"

namespace platoon::fairness {

/// Per-lane fairness indices, the network reference index, and the
/// per-lane absolute deviations (the fairness objective values).
struct FairnessReport {
  std::vector<double> lane_indices;  // K_index^i
  double network_index = 0.0;        // K_index
  std::vector<double> deviations;    // |K_index^i - K_index|
};

/// K_index^i = 2R / (v * (W0 + 1)). The window is accepted as a real so the
/// identity can be evaluated off the integer grid; depends on nothing else
/// (in particular not on the arrival rate).
double lane_fairness_index(double velocity, double w0, double coverage);

/// Network reference K_index = 2R / (v_bar * (W_bar + 1)), evaluated at the
/// configured mean velocity and mean window.
double network_fairness_index(double mean_velocity, double mean_w0,
                              double coverage);

/// Fairness objective values F_K_i = |K_index^i - K_index| for each lane,
/// with the reference taken from params (mean_velocity, mean_window).
std::vector<double> fairness_objectives(std::span<const LaneScenario> lanes,
                                        const WindowAssignment& assignment,
                                        const NetworkParams& params);

/// Same computation, returning indices and deviations together.
FairnessReport fairness_report(std::span<const LaneScenario> lanes,
                               const WindowAssignment& assignment,
                               const NetworkParams& params);

}  // namespace platoon::fairness
