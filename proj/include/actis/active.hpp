#pragma once

#include <cstdint>
#include <vector>

#include "actis/rng.hpp"

namespace actis {

// Fixed-threshold query rule: ask iff the criterion is strictly below theta.
inline bool should_query_fixed(double theta, double criterion) {
  return criterion < theta;
}

// Randomised variable threshold. Each consultation draws eta ~ N(1, delta);
// the instance is queried iff criterion < theta*eta, after which theta
// shrinks by (1-s); otherwise it grows by (1+s). theta is clamped to
// [kThetaFloor, 1] so the criterion range [0,1] stays reachable.
class VariableUncertaintyStrategy {
 public:
  static constexpr double kThetaFloor = 1e-6;

  VariableUncertaintyStrategy(double theta0, double step_size, double delta);

  bool should_query(double criterion, Rng& rng);

  double theta() const { return theta_; }
  double step_size() const { return step_size_; }
  double delta() const { return delta_; }

 private:
  double theta_, step_size_, delta_;
};

enum class BudgetMechanism { Exact, WindowExact, WindowApprox };

// Tracks labelling spending against the budget B. The estimate is u/t for
// the exact mechanism, the count over the last w steps for window-exact, and
// the geometric approximation u_hat = lambda*u_hat + a(x), lambda=(w-1)/w,
// for window-approx. record() must be called exactly once per time step,
// whether or not the step queried.
class BudgetMeter {
 public:
  BudgetMeter(BudgetMechanism mechanism, double budget, int window);

  // True iff the current spending estimate is strictly below the budget.
  bool within_budget() const;
  void record(bool queried);

  double spending() const;
  std::int64_t steps() const { return steps_; }
  std::int64_t total_queried() const { return total_queried_; }
  double budget() const { return budget_; }
  int window() const { return window_; }
  BudgetMechanism mechanism() const { return mechanism_; }

 private:
  BudgetMechanism mechanism_;
  double budget_;
  int window_;
  std::int64_t steps_ = 0;
  std::int64_t total_queried_ = 0;
  // window-exact ring
  std::vector<char> ring_;
  std::size_t ring_pos_ = 0;
  std::int64_t window_count_ = 0;
  // window-approx accumulator
  double u_hat_ = 0.0;
};

}  // namespace actis
