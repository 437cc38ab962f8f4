#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "platoon/dcf.hpp"

namespace platoon::aoi {

/// One back-off/service rate pair per link (per vehicle). The lane-level
/// rates expand to this per-vehicle form for the oracle and the per-link
/// closed form.
struct ShsInstance {
  std::vector<double> backoff_rates;  // R_k (1/s)
  std::vector<double> service_rates;  // H_k (1/s)

  static ShsInstance from_lanes(const dcf::ShsRates& rates);
  std::size_t link_count() const { return backoff_rates.size(); }
  void validate() const;
};

/// Ages produced by the closed form: one average per lane, their
/// vehicle-count-weighted network mean, and the normalization factor C(R).
struct AgeResult {
  std::vector<double> per_lane_age;  // seconds
  double network_age = 0.0;          // seconds
  double normalization = 0.0;        // C(R) >= 1
};

/// C(R) = 1 + sum_k R_k / H_k.
double normalization_factor(const ShsInstance& instance);
/// Lane form of the same factor: 1 + sum_i n_i * R_i / H_i.
double normalization_factor(const dcf::ShsRates& rates);

/// Closed-form steady state of the channel chain: element 0 is the idle
/// probability 1 / C(R); element k is R_k / (C(R) * H_k).
std::vector<double> steady_state_probs(const ShsInstance& instance);

/// Closed-form average age of one link:
///   age_k = C(R) / R_k + sum_q R_q / (C(R) * H_q^2).
double link_age(const ShsInstance& instance, std::size_t link);

/// Lane form of the link age (every vehicle on a lane sees the same value).
double link_average_age(std::size_t lane, const dcf::ShsRates& rates);

/// Network average age: the vehicle-count-weighted mean of the per-lane
/// ages. Also reports C(R).
AgeResult network_average_age(const dcf::ShsRates& rates);

/// Steady-state probabilities recovered by numerically solving the global
/// balance equations of the channel chain (independent of the closed form).
std::vector<double> balance_probs(const ShsInstance& instance);

/// Full solution of the stationary-correlation linear system for one tagged
/// link: the age is the sum of the receiver-age correlations over states.
struct OracleLinkSolve {
  double age = 0.0;
  std::vector<double> receiver_corr;  // v_q0 per state q = 0..N_v
  std::vector<double> link_corr;      // v_q1 per state q = 0..N_v
};

/// Builds and solves the stationary-correlation system for `link`, using
/// the numeric balance probabilities and the transition reset maps (the
/// tagged link's service transition resets [x0, x1] -> [x1, 0], every other
/// transition is the identity). Kept free of the closed form so it can act
/// as an independent oracle for it.
OracleLinkSolve oracle_link_solve(const ShsInstance& instance,
                                  std::size_t link);

/// Per-link ages from the oracle. Dense solves; refuses instances above
/// `max_links`.
std::vector<double> markov_oracle(const ShsInstance& instance,
                                  std::size_t max_links = 12);

/// Equal-service-rate approximation of the network age driven only by the
/// window ratios:
///   age ~= (sum_j (sum_k R_k) / R_j + 1) / H_s,
/// with R_k = 2 / ((W_k - 1) * T_slot). Minimized when all windows agree.
double symmetric_age(double service_rate, std::span<const int> windows,
                     double slot_time);

}  // namespace platoon::aoi
