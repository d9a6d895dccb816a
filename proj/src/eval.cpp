#include "actis/eval.hpp"

#include <cmath>
#include <stdexcept>

namespace actis {

PrequentialGmean::PrequentialGmean(int num_classes, double fading)
    : fading_(fading),
      correct_(static_cast<std::size_t>(num_classes), 0.0),
      n_(static_cast<std::size_t>(num_classes), 0.0) {
  if (num_classes < 2)
    throw std::invalid_argument("gmean: need at least two classes");
  if (!(fading > 0.0) || fading > 1.0)
    throw std::invalid_argument("gmean: fading factor must be in (0, 1]");
}

void PrequentialGmean::update(int y_true, int y_pred) {
  if (y_true < 0 || y_true >= num_classes())
    throw std::invalid_argument("gmean: true label out of range");
  if (y_pred < 0 || y_pred >= num_classes())
    throw std::invalid_argument("gmean: prediction out of range");
  for (std::size_t c = 0; c < n_.size(); ++c) {
    correct_[c] *= fading_;
    n_[c] *= fading_;
  }
  n_[y_true] += 1.0;
  if (y_pred == y_true) correct_[y_true] += 1.0;
  ++updates_;
}

bool PrequentialGmean::seen(int cls) const { return n_.at(cls) > 0.0; }

double PrequentialGmean::recall(int cls) const {
  const double n = n_.at(cls);
  return n > 0.0 ? correct_[cls] / n : 0.0;
}

double PrequentialGmean::weight(int cls) const { return n_.at(cls); }

double PrequentialGmean::gmean() const {
  int seen_count = 0;
  double log_sum = 0.0;
  for (int c = 0; c < num_classes(); ++c) {
    if (n_[c] <= 0.0) continue;
    const double r = correct_[c] / n_[c];
    if (r <= 0.0) return 0.0;
    log_sum += std::log(r);
    ++seen_count;
  }
  if (seen_count == 0) return 0.0;
  return std::exp(log_sum / seen_count);
}

AggregateCurve aggregate(const std::vector<std::vector<double>>& curves) {
  if (curves.empty())
    throw std::invalid_argument("aggregate: no curves");
  const std::size_t len = curves.front().size();
  for (const auto& c : curves)
    if (c.size() != len)
      throw std::invalid_argument("aggregate: curve lengths differ");

  const int n = static_cast<int>(curves.size());
  AggregateCurve out;
  out.n = n;
  out.mean.assign(len, 0.0);
  out.se.assign(len, 0.0);
  for (const auto& c : curves)
    for (std::size_t t = 0; t < len; ++t) out.mean[t] += c[t];
  for (std::size_t t = 0; t < len; ++t) out.mean[t] /= n;
  if (n > 1) {
    for (const auto& c : curves)
      for (std::size_t t = 0; t < len; ++t) {
        const double d = c[t] - out.mean[t];
        out.se[t] += d * d;
      }
    for (std::size_t t = 0; t < len; ++t)
      out.se[t] = std::sqrt(out.se[t] / (n - 1)) / std::sqrt(double(n));
  }
  return out;
}

}  // namespace actis
