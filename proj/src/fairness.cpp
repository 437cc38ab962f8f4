#include "platoon/fairness.hpp"

#include <cmath>
#include <stdexcept>

namespace platoon::fairness {

double lane_fairness_index(double velocity, double w0, double coverage) {
  if (!(velocity > 0.0))
    throw std::domain_error("lane_fairness_index: velocity must be positive");
  if (!(w0 >= 1.0))
    throw std::domain_error("lane_fairness_index: window must be >= 1");
  if (!(coverage > 0.0))
    throw std::domain_error("lane_fairness_index: coverage must be positive");
  return 2.0 * coverage / (velocity * (w0 + 1.0));
}

double network_fairness_index(double mean_velocity, double mean_w0,
                              double coverage) {
  return lane_fairness_index(mean_velocity, mean_w0, coverage);
}

FairnessReport fairness_report(std::span<const LaneScenario> lanes,
                               const WindowAssignment& assignment,
                               const NetworkParams& params) {
  if (lanes.size() != assignment.windows.size())
    throw std::invalid_argument("fairness_report: lanes/windows mismatch");
  FairnessReport report;
  report.network_index = network_fairness_index(
      params.mean_velocity, params.mean_window, params.coverage_r);
  report.lane_indices.reserve(lanes.size());
  report.deviations.reserve(lanes.size());
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const double index = lane_fairness_index(
        lanes[i].velocity, assignment.windows[i], params.coverage_r);
    report.lane_indices.push_back(index);
    report.deviations.push_back(std::abs(index - report.network_index));
  }
  return report;
}

std::vector<double> fairness_objectives(std::span<const LaneScenario> lanes,
                                        const WindowAssignment& assignment,
                                        const NetworkParams& params) {
  return fairness_report(lanes, assignment, params).deviations;
}

}  // namespace platoon::fairness
