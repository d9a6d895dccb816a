#include "actis/active.hpp"

#include <algorithm>
#include <stdexcept>

namespace actis {

VariableUncertaintyStrategy::VariableUncertaintyStrategy(double theta0,
                                                         double step_size,
                                                         double delta)
    : theta_(theta0), step_size_(step_size), delta_(delta) {
  if (theta0 <= 0.0 || theta0 > 1.0)
    throw std::invalid_argument("strategy: theta0 must be in (0, 1]");
  if (step_size <= 0.0) throw std::invalid_argument("strategy: s must be > 0");
  if (delta < 0.0) throw std::invalid_argument("strategy: delta must be >= 0");
}

bool VariableUncertaintyStrategy::should_query(double criterion, Rng& rng) {
  const double eta = 1.0 + delta_ * rng.normal();
  const double theta_rdm = theta_ * eta;
  const bool query = criterion < theta_rdm;
  theta_ *= query ? (1.0 - step_size_) : (1.0 + step_size_);
  theta_ = std::clamp(theta_, kThetaFloor, 1.0);
  return query;
}

BudgetMeter::BudgetMeter(BudgetMechanism mechanism, double budget, int window)
    : mechanism_(mechanism), budget_(budget), window_(window) {
  if (budget < 0.0 || budget > 1.0)
    throw std::invalid_argument("budget: B must be in [0, 1]");
  if (window < 1) throw std::invalid_argument("budget: window must be >= 1");
  if (mechanism_ == BudgetMechanism::WindowExact) ring_.assign(window, 0);
}

double BudgetMeter::spending() const {
  switch (mechanism_) {
    case BudgetMechanism::Exact:
      return steps_ == 0 ? 0.0
                         : static_cast<double>(total_queried_) /
                               static_cast<double>(steps_);
    case BudgetMechanism::WindowExact:
      return static_cast<double>(window_count_) / window_;
    case BudgetMechanism::WindowApprox:
      return u_hat_ / window_;
  }
  return 0.0;
}

bool BudgetMeter::within_budget() const { return spending() < budget_; }

void BudgetMeter::record(bool queried) {
  ++steps_;
  if (queried) ++total_queried_;
  switch (mechanism_) {
    case BudgetMechanism::Exact:
      break;
    case BudgetMechanism::WindowExact:
      window_count_ += (queried ? 1 : 0) - ring_[ring_pos_];
      ring_[ring_pos_] = queried ? 1 : 0;
      ring_pos_ = (ring_pos_ + 1) % ring_.size();
      break;
    case BudgetMechanism::WindowApprox: {
      const double lambda = (window_ - 1.0) / window_;
      u_hat_ = lambda * u_hat_ + (queried ? 1.0 : 0.0);
      break;
    }
  }
}

}  // namespace actis
