#include "platoon/aoi.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace platoon::aoi {

ShsInstance ShsInstance::from_lanes(const dcf::ShsRates& rates) {
  rates.validate();
  ShsInstance instance;
  for (std::size_t i = 0; i < rates.lane_counts.size(); ++i) {
    for (int k = 0; k < rates.lane_counts[i]; ++k) {
      instance.backoff_rates.push_back(rates.backoff_rates[i]);
      instance.service_rates.push_back(rates.service_rates[i]);
    }
  }
  if (instance.backoff_rates.empty())
    throw std::invalid_argument("ShsInstance: no vehicles in any lane");
  return instance;
}

void ShsInstance::validate() const {
  if (backoff_rates.empty() || backoff_rates.size() != service_rates.size())
    throw std::invalid_argument("ShsInstance: rate vectors must match and be non-empty");
  for (double r : backoff_rates)
    if (!(r > 0.0)) throw std::invalid_argument("ShsInstance: back-off rate must be positive");
  for (double h : service_rates)
    if (!(h > 0.0)) throw std::invalid_argument("ShsInstance: service rate must be positive");
}

double normalization_factor(const ShsInstance& instance) {
  instance.validate();
  double c = 1.0;
  for (std::size_t k = 0; k < instance.link_count(); ++k)
    c += instance.backoff_rates[k] / instance.service_rates[k];
  return c;
}

double normalization_factor(const dcf::ShsRates& rates) {
  rates.validate();
  double c = 1.0;
  for (std::size_t i = 0; i < rates.lane_counts.size(); ++i)
    c += rates.lane_counts[i] * rates.backoff_rates[i] / rates.service_rates[i];
  return c;
}

std::vector<double> steady_state_probs(const ShsInstance& instance) {
  const double c = normalization_factor(instance);
  std::vector<double> probs(instance.link_count() + 1);
  probs[0] = 1.0 / c;
  for (std::size_t k = 0; k < instance.link_count(); ++k)
    probs[k + 1] = instance.backoff_rates[k] / (c * instance.service_rates[k]);
  return probs;
}

double link_age(const ShsInstance& instance, std::size_t link) {
  if (link >= instance.link_count())
    throw std::out_of_range("link_age: link out of range");
  const double c = normalization_factor(instance);
  double tail = 0.0;
  for (std::size_t q = 0; q < instance.link_count(); ++q)
    tail += instance.backoff_rates[q] /
            (c * instance.service_rates[q] * instance.service_rates[q]);
  return c / instance.backoff_rates[link] + tail;
}

double link_average_age(std::size_t lane, const dcf::ShsRates& rates) {
  rates.validate();
  if (lane >= rates.lane_counts.size())
    throw std::out_of_range("link_average_age: lane out of range");
  const double c = normalization_factor(rates);
  double tail = 0.0;
  for (std::size_t j = 0; j < rates.lane_counts.size(); ++j)
    tail += rates.lane_counts[j] * rates.backoff_rates[j] /
            (c * rates.service_rates[j] * rates.service_rates[j]);
  return c / rates.backoff_rates[lane] + tail;
}

AgeResult network_average_age(const dcf::ShsRates& rates) {
  rates.validate();
  AgeResult result;
  result.normalization = normalization_factor(rates);
  double tail = 0.0;
  for (std::size_t j = 0; j < rates.lane_counts.size(); ++j)
    tail += rates.lane_counts[j] * rates.backoff_rates[j] /
            (result.normalization * rates.service_rates[j] *
             rates.service_rates[j]);
  long total = 0;
  double weighted = 0.0;
  result.per_lane_age.reserve(rates.lane_counts.size());
  for (std::size_t i = 0; i < rates.lane_counts.size(); ++i) {
    const double age =
        result.normalization / rates.backoff_rates[i] + tail;
    result.per_lane_age.push_back(age);
    weighted += rates.lane_counts[i] * age;
    total += rates.lane_counts[i];
  }
  if (total < 1)
    throw std::invalid_argument("network_average_age: no vehicles in any lane");
  result.network_age = weighted / static_cast<double>(total);
  return result;
}

std::vector<double> balance_probs(const ShsInstance& instance) {
  instance.validate();
  const std::size_t n = instance.link_count();
  // States 0..n of a star chain: 0 -> k at R_k, k -> 0 at H_k. Balance of
  // each non-idle state plus normalization; solved numerically on purpose
  // rather than through the closed form.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    a(k, k + 1) = instance.service_rates[k];
    a(k, 0) = -instance.backoff_rates[k];
  }
  a.row(n).setOnes();
  b(n) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible())
    throw std::runtime_error(
        "balance_probs: singular balance system (rank " +
        std::to_string(lu.rank()) + " of " + std::to_string(n + 1) + ")");
  Eigen::VectorXd pi = lu.solve(b);
  return {pi.data(), pi.data() + n + 1};
}

OracleLinkSolve oracle_link_solve(const ShsInstance& instance,
                                  std::size_t link) {
  instance.validate();
  const std::size_t n = instance.link_count();
  if (link >= n) throw std::out_of_range("oracle_link_solve: link out of range");

  const std::vector<double> pi = balance_probs(instance);
  const auto& rates = instance.backoff_rates;
  const auto& service = instance.service_rates;
  double rate_sum = 0.0;
  for (double r : rates) rate_sum += r;

  // Unknowns: v_q0 at 2q, v_q1 at 2q+1 for states q = 0..n. Each state
  // contributes two stationary-correlation equations: outflow times its
  // correlation equals the age slope times pi_q plus the reset-mapped
  // inflow. Only the tagged link's service transition is non-identity:
  // it maps [x0, x1] to [x1, 0].
  const std::size_t dim = 2 * (n + 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);

  // Idle state: outflow at rate_sum, inflow from every service transition.
  a(0, 0) = rate_sum;
  a(1, 1) = rate_sum;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t vj0 = 2 * (j + 1), vj1 = vj0 + 1;
    if (j == link) {
      a(0, vj1) -= service[j];  // reset delivers [v_j1, 0]
    } else {
      a(0, vj0) -= service[j];
      a(1, vj1) -= service[j];
    }
  }
  b(0) = pi[0];  // receiver age always grows at slope one

  // Busy states: outflow at H_q, inflow from idle via an identity reset.
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t row0 = 2 * (q + 1), row1 = row0 + 1;
    a(row0, row0) = service[q];
    a(row0, 0) = -rates[q];
    b(row0) = pi[q + 1];
    a(row1, row1) = service[q];
    a(row1, 1) = -rates[q];
    // The link age only grows while the tagged link holds the channel.
    b(row1) = (q == link) ? pi[q + 1] : 0.0;
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible())
    throw std::runtime_error(
        "oracle_link_solve: singular correlation system (rank " +
        std::to_string(lu.rank()) + " of " + std::to_string(dim) + ")");
  Eigen::VectorXd x = lu.solve(b);

  OracleLinkSolve solve;
  solve.receiver_corr.resize(n + 1);
  solve.link_corr.resize(n + 1);
  for (std::size_t q = 0; q <= n; ++q) {
    solve.receiver_corr[q] = x(2 * q);
    solve.link_corr[q] = x(2 * q + 1);
    solve.age += x(2 * q);
  }
  return solve;
}

std::vector<double> markov_oracle(const ShsInstance& instance,
                                  std::size_t max_links) {
  instance.validate();
  if (instance.link_count() > max_links)
    throw std::invalid_argument("markov_oracle: instance exceeds the dense-solve cap");
  std::vector<double> ages;
  ages.reserve(instance.link_count());
  for (std::size_t k = 0; k < instance.link_count(); ++k)
    ages.push_back(oracle_link_solve(instance, k).age);
  return ages;
}

double symmetric_age(double service_rate, std::span<const int> windows,
                     double slot_time) {
  if (!(service_rate > 0.0))
    throw std::domain_error("symmetric_age: service rate must be positive");
  if (!(slot_time > 0.0))
    throw std::domain_error("symmetric_age: slot time must be positive");
  if (windows.empty())
    throw std::invalid_argument("symmetric_age: no windows given");
  std::vector<double> rates;
  rates.reserve(windows.size());
  for (int w : windows) {
    if (w < 2) throw std::domain_error("symmetric_age: window must be >= 2");
    rates.push_back(2.0 / ((w - 1.0) * slot_time));
  }
  double rate_sum = 0.0;
  for (double r : rates) rate_sum += r;
  double ratio_sum = 0.0;
  for (double r : rates) ratio_sum += rate_sum / r;
  return (ratio_sum + 1.0) / service_rate;
}

}  // namespace platoon::aoi
