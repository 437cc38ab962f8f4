#include "platoon/dcf.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "platoon/errors.hpp"

namespace platoon::dcf {

void ShsRates::validate() const {
  if (backoff_rates.size() != service_rates.size() ||
      backoff_rates.size() != lane_counts.size() || backoff_rates.empty())
    throw std::invalid_argument("ShsRates: per-lane vectors must match");
  for (double r : backoff_rates)
    if (!(r > 0.0)) throw std::invalid_argument("ShsRates: back-off rate must be positive");
  for (double h : service_rates)
    if (!(h > 0.0)) throw std::invalid_argument("ShsRates: service rate must be positive");
  for (int n : lane_counts)
    if (n < 0) throw std::invalid_argument("ShsRates: negative lane count");
}

double transmission_probability(int w0) {
  if (w0 < 1)
    throw std::domain_error("transmission_probability: window must be >= 1");
  return 2.0 / (w0 + 1.0);
}

double collision_probability(std::size_t lane, const WindowAssignment& assignment,
                             std::span<const int> counts) {
  if (assignment.windows.size() != counts.size())
    throw std::invalid_argument("collision_probability: windows/counts mismatch");
  if (lane >= counts.size())
    throw std::out_of_range("collision_probability: lane out of range");
  if (counts[lane] < 1)
    throw std::invalid_argument("collision_probability: queried lane is empty");
  double nobody_else = 1.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const double tau = transmission_probability(assignment.windows[j]);
    const int others = (j == lane) ? counts[j] - 1 : counts[j];
    nobody_else *= std::pow(1.0 - tau, others);
  }
  return 1.0 - nobody_else;
}

int min_window_lower_bound(std::span<const int> counts, double p_up,
                           int window_ub) {
  const long total = std::accumulate(counts.begin(), counts.end(), 0L);
  if (total < 1)
    throw std::invalid_argument("min_window_lower_bound: no vehicles");
  if (!(p_up > 0.0 && p_up < 1.0))
    throw std::invalid_argument("min_window_lower_bound: cap must lie in (0, 1)");
  if (window_ub < 2)
    throw std::invalid_argument("min_window_lower_bound: window_ub below 2");

  const auto worst_collision = [&](int window) {
    WindowAssignment uniform;
    uniform.windows.assign(counts.size(), window);
    double worst = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] < 1) continue;
      worst = std::max(worst, collision_probability(i, uniform, counts));
    }
    return worst;
  };

  const double floor_p = worst_collision(window_ub);
  if (floor_p > p_up)
    throw infeasible_error(
        "min_window_lower_bound: collision cap unreachable within window_ub",
        floor_p);

  // p is decreasing in the window, so bisect for the first window under cap.
  int lo = 2, hi = window_ub;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (worst_collision(mid) <= p_up)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

double backoff_rate(int w0, double slot_time) {
  if (w0 < 2) throw std::domain_error("backoff_rate: window must be >= 2");
  if (!(slot_time > 0.0))
    throw std::domain_error("backoff_rate: slot time must be positive");
  return 2.0 / ((w0 - 1.0) * slot_time);
}

double service_rate(double tx_time) {
  if (!(tx_time > 0.0))
    throw std::domain_error("service_rate: transmission time must be positive");
  return 1.0 / tx_time;
}

double per_vehicle_tx_rate(std::size_t lane, const WindowAssignment& assignment,
                           std::span<const int> counts,
                           const NetworkParams& params) {
  if (!params.normalized_throughput || !params.channel_bitrate ||
      !params.packet_bits)
    throw std::invalid_argument(
        "per_vehicle_tx_rate: channel parameters (S, C_bit, N_bit) not configured");
  if (assignment.windows.size() != counts.size())
    throw std::invalid_argument("per_vehicle_tx_rate: windows/counts mismatch");
  if (lane >= counts.size())
    throw std::out_of_range("per_vehicle_tx_rate: lane out of range");
  double tau_sum = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j)
    tau_sum += counts[j] * transmission_probability(assignment.windows[j]);
  if (!(tau_sum > 0.0))
    throw std::invalid_argument("per_vehicle_tx_rate: empty network");
  return *params.normalized_throughput *
         (*params.channel_bitrate / *params.packet_bits) *
         transmission_probability(assignment.windows[lane]) / tau_sum;
}

ShsRates make_shs_rates(const WindowAssignment& assignment,
                        std::span<const int> counts,
                        const NetworkParams& params) {
  if (assignment.windows.size() != counts.size())
    throw std::invalid_argument("make_shs_rates: windows/counts mismatch");
  ShsRates rates;
  rates.backoff_rates.reserve(counts.size());
  rates.service_rates.reserve(counts.size());
  for (int w : assignment.windows) {
    rates.backoff_rates.push_back(backoff_rate(w, params.slot_time));
    rates.service_rates.push_back(service_rate(params.tx_time));
  }
  rates.lane_counts.assign(counts.begin(), counts.end());
  rates.validate();
  return rates;
}

}  // namespace platoon::dcf
