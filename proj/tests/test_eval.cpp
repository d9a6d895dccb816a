#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "actis/eval.hpp"
#include "actis/rng.hpp"
#include "doctest.h"

using namespace actis;

namespace {

// Confusion-matrix G-mean over the classes that appeared, used as the
// independent reference for the fading-free case.
double batch_gmean(const std::vector<int>& truth,
                   const std::vector<int>& pred, int num_classes) {
  std::vector<double> n(num_classes, 0.0), ok(num_classes, 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    n[truth[i]] += 1.0;
    if (truth[i] == pred[i]) ok[truth[i]] += 1.0;
  }
  double log_sum = 0.0;
  int seen = 0;
  for (int c = 0; c < num_classes; ++c) {
    if (n[c] == 0.0) continue;
    ++seen;
    if (ok[c] == 0.0) return 0.0;
    log_sum += std::log(ok[c] / n[c]);
  }
  return seen == 0 ? 0.0 : std::exp(log_sum / seen);
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("fading one reduces to the confusion matrix g-mean") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int num_classes = 2 + static_cast<int>(rng.uniform_int(5));
    const int steps = 50 + static_cast<int>(rng.uniform_int(200));
    PrequentialGmean metric(num_classes, 1.0);
    std::vector<int> truth, pred;
    for (int i = 0; i < steps; ++i) {
      truth.push_back(static_cast<int>(rng.uniform_int(num_classes)));
      pred.push_back(static_cast<int>(rng.uniform_int(num_classes)));
      metric.update(truth.back(), pred.back());
    }
    CHECK(metric.gmean() ==
          doctest::Approx(batch_gmean(truth, pred, num_classes))
              .epsilon(1e-12));
  }
}

TEST_CASE("faded class weight follows the geometric series") {
  PrequentialGmean metric(2, 0.99);
  const int steps = 100;
  for (int i = 0; i < steps; ++i) metric.update(0, 0);
  // sum of f^age over 100 arrivals: (1 - f^100) / (1 - f)
  const double expected = (1.0 - std::pow(0.99, steps)) / 0.01;
  CHECK(metric.weight(0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_EQ(metric.weight(1), 0.0);
  CHECK(metric.seen(0));
  CHECK_FALSE(metric.seen(1));
}

TEST_CASE("fading lets the metric recover from an early losing streak") {
  PrequentialGmean metric(2, 0.99);
  for (int i = 0; i < 300; ++i) metric.update(i % 2, (i + 1) % 2);  // wrong
  CHECK_EQ(metric.gmean(), 0.0);
  for (int i = 0; i < 1500; ++i) metric.update(i % 2, i % 2);  // right
  CHECK_GT(metric.gmean(), 0.99);

  PrequentialGmean frozen(2, 1.0);
  for (int i = 0; i < 300; ++i) frozen.update(i % 2, (i + 1) % 2);
  for (int i = 0; i < 1500; ++i) frozen.update(i % 2, i % 2);
  CHECK_LT(frozen.gmean(), 0.85);  // without fading the mistakes linger
}

TEST_CASE("fading one makes the metric order independent") {
  std::vector<std::pair<int, int>> events;
  Rng rng(32);
  for (int i = 0; i < 400; ++i)
    events.push_back({static_cast<int>(rng.uniform_int(3)),
                      static_cast<int>(rng.uniform_int(3))});
  PrequentialGmean forward(3, 1.0), backward(3, 1.0);
  for (const auto& [t, p] : events) forward.update(t, p);
  std::reverse(events.begin(), events.end());
  for (const auto& [t, p] : events) backward.update(t, p);
  CHECK(forward.gmean() == doctest::Approx(backward.gmean()).epsilon(1e-12));
}

TEST_CASE("unseen classes stay out of the root") {
  PrequentialGmean metric(3, 0.99);
  metric.update(0, 0);
  metric.update(1, 1);
  CHECK(metric.gmean() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_EQ(metric.recall(2), 0.0);
  // a miss against a still-unseen class hurts only the true class
  metric.update(0, 2);
  CHECK_FALSE(metric.seen(2));
  CHECK_LT(metric.gmean(), 1.0);
  CHECK_GT(metric.gmean(), 0.0);
  // once class 2 arrives and is never right, the g-mean collapses
  metric.update(2, 0);
  CHECK_EQ(metric.gmean(), 0.0);
}

TEST_CASE("update validates labels and construction validates arguments") {
  PrequentialGmean metric(2, 0.99);
  CHECK_THROWS_AS(metric.update(-1, 0), std::invalid_argument);
  CHECK_THROWS_AS(metric.update(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(PrequentialGmean(1, 0.99), std::invalid_argument);
  CHECK_THROWS_AS(PrequentialGmean(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PrequentialGmean(2, 1.5), std::invalid_argument);
}

TEST_CASE("aggregate computes mean and standard error per step") {
  const std::vector<std::vector<double>> curves = {{0.4, 1.0}, {0.6, 1.0}};
  const AggregateCurve agg = aggregate(curves);
  REQUIRE_EQ(agg.mean.size(), 2u);
  CHECK_EQ(agg.n, 2);
  CHECK(agg.mean[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(agg.mean[1] == doctest::Approx(1.0).epsilon(1e-15));
  // sample sd of {0.4, 0.6} is 0.1414..., se = sd / sqrt(2) = 0.1
  CHECK(agg.se[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(agg.se[1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("aggregate of a single curve has zero standard error") {
  const AggregateCurve agg = aggregate({{0.2, 0.8, 0.5}});
  CHECK_EQ(agg.n, 1);
  for (const double se : agg.se) CHECK_EQ(se, 0.0);
  CHECK_EQ(agg.mean, std::vector<double>({0.2, 0.8, 0.5}));
}

TEST_CASE("aggregate rejects empty input and ragged curves") {
  CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
  CHECK_THROWS_AS(aggregate({{0.1, 0.2}, {0.1}}), std::invalid_argument);
}

}  // TEST_SUITE
