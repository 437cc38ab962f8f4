#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace platoon {

/// Raised when a feasibility requirement cannot be met. Carries the best
/// candidate seen so callers can report how close the search got.
class infeasible_error : public std::runtime_error {
 public:
  infeasible_error(const std::string& what, double best_violation,
                   std::vector<int> best_windows = {})
      : std::runtime_error(what),
        best_violation_(best_violation),
        best_windows_(std::move(best_windows)) {}

  double best_violation() const noexcept { return best_violation_; }
  const std::vector<int>& best_windows() const noexcept {
    return best_windows_;
  }

 private:
  double best_violation_;
  std::vector<int> best_windows_;
};

/// Configuration error with the offending field name attached.
class config_error : public std::runtime_error {
 public:
  config_error(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace platoon
