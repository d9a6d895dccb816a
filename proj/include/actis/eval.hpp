#pragma once

#include <cstdint>
#include <vector>

namespace actis {

// Prequential recall tracking with a fading factor. Every update first decays
// all counts by f, then adds the new outcome, so old mistakes wash out and
// the metric can recover after drift. G-mean is the geometric mean of the
// per-class recalls over the classes seen so far; classes that have not
// appeared yet are left out of the root.
class PrequentialGmean {
 public:
  PrequentialGmean(int num_classes, double fading);

  void update(int y_true, int y_pred);

  double gmean() const;
  double recall(int cls) const;  // 0 for classes not seen yet
  bool seen(int cls) const;
  // Faded occurrence weight of a class, sum of f^age over its arrivals.
  double weight(int cls) const;

  int num_classes() const { return static_cast<int>(n_.size()); }
  double fading() const { return fading_; }
  std::int64_t updates() const { return updates_; }

 private:
  double fading_;
  std::vector<double> correct_;  // faded correct predictions per true class
  std::vector<double> n_;        // faded arrivals per true class
  std::int64_t updates_ = 0;
};

// Point-wise mean and standard error across repetition curves.
struct AggregateCurve {
  std::vector<double> mean;
  std::vector<double> se;  // sample stddev / sqrt(n); all zero when n == 1
  int n = 0;
};

// Throws std::invalid_argument when curves is empty or lengths differ.
AggregateCurve aggregate(const std::vector<std::vector<double>>& curves);

}  // namespace actis
