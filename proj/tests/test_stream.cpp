#include <cmath>
#include <map>
#include <vector>

#include "actis/stream.hpp"
#include "doctest.h"

using namespace actis;

namespace {

// chi-squared critical values at p = 0.001
constexpr double kChi2Df3 = 16.266;
constexpr double kChi2Df9 = 27.877;

double chi2(const std::vector<std::int64_t>& counts,
            const std::vector<double>& priors, std::int64_t n) {
  double stat = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const double expect = priors[c] * static_cast<double>(n);
    const double d = static_cast<double>(counts[c]) - expect;
    stat += d * d / expect;
  }
  return stat;
}

}  // namespace

TEST_SUITE("stream") {

TEST_CASE("imbalance profiles validate and sum to one") {
  const auto bal = ImbalanceProfile::balanced(4);
  CHECK(bal.priors == std::vector<double>{0.25, 0.25, 0.25, 0.25});

  const auto imb = ImbalanceProfile::multi_minority(4, 0, 0.97);
  CHECK(imb.priors[0] == doctest::Approx(0.97));
  CHECK(imb.priors[1] == doctest::Approx(0.01));
  CHECK(imb.priors[3] == doctest::Approx(0.01));

  const auto ten = ImbalanceProfile::multi_minority(10, 2, 0.955);
  double sum = 0.0;
  for (const double p : ten.priors) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ten.priors[2] == doctest::Approx(0.955));
  CHECK(ten.priors[0] == doctest::Approx(0.005));

  ImbalanceProfile bad{{0.5, 0.6}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  ImbalanceProfile zero{{1.0, 0.0}};
  CHECK_THROWS_AS(zero.validate(), std::invalid_argument);
}

TEST_CASE("sea4 labels follow the threshold bands") {
  Sea4Config cfg;
  CHECK(sea4_label(1.0, 1.0, cfg, 0) == 0);   // sum 2 < 3
  CHECK(sea4_label(2.0, 1.0, cfg, 0) == 1);   // sum 3, lower bound inclusive
  CHECK(sea4_label(2.5, 2.49, cfg, 0) == 1);  // sum 4.99
  CHECK(sea4_label(2.5, 2.5, cfg, 0) == 2);   // sum 5
  CHECK(sea4_label(3.5, 3.5, cfg, 0) == 3);   // sum 7
  CHECK(sea4_label(9.0, 9.0, cfg, 0) == 3);

  CHECK_THROWS_AS(sea4_label(-0.1, 5.0, cfg, 0), std::domain_error);
  CHECK_THROWS_AS(sea4_label(5.0, 10.1, cfg, 0), std::domain_error);
}

TEST_CASE("sea4 drift swaps the threshold triple at the scheduled step") {
  Sea4Config cfg;
  cfg.drift_step = 100;
  // sum 5.5: class 2 under (3,5,7), class 1 under (2,6,8)
  CHECK(sea4_label(2.75, 2.75, cfg, 99) == 2);
  CHECK(sea4_label(2.75, 2.75, cfg, 100) == 1);
  CHECK(sea4_label(2.75, 2.75, cfg, 5000) == 1);
  // sum 2.5: class 0 before, class 1 after
  CHECK(sea4_label(1.25, 1.25, cfg, 99) == 0);
  CHECK(sea4_label(1.25, 1.25, cfg, 100) == 1);
}

TEST_CASE("sea4 samples carry the label of their own region") {
  Sea4Config cfg;
  cfg.drift_step = 500;
  const Sea4Generator gen(cfg, ImbalanceProfile::balanced(4));
  Rng rng(42);
  for (const std::int64_t t : {std::int64_t(0), std::int64_t(499),
                               std::int64_t(500), std::int64_t(2000)}) {
    for (int i = 0; i < 500; ++i) {
      const Instance inst = gen.sample(rng, t);
      REQUIRE(inst.y.has_value());
      CHECK(inst.t == t);
      CHECK(inst.x[0] >= 0.0);
      CHECK(inst.x[0] <= 1.0);
      // denormalize and reapply the labelling rule
      CHECK(sea4_label(inst.x[0] * 10.0, inst.x[1] * 10.0, cfg, t) == *inst.y);
    }
  }
}

TEST_CASE("empirical class frequencies match the priors") {
  Rng rng(7);
  const int n = 100000;

  SUBCASE("balanced sea4") {
    const Sea4Generator gen(Sea4Config{}, ImbalanceProfile::balanced(4));
    std::vector<std::int64_t> counts(4, 0);
    for (int i = 0; i < n; ++i) ++counts[*gen.sample(rng, 0).y];
    for (const auto c : counts)
      CHECK(std::fabs(double(c) / n - 0.25) < 0.01);
    CHECK(chi2(counts, {0.25, 0.25, 0.25, 0.25}, n) < kChi2Df3);
  }

  SUBCASE("imbalanced sea4") {
    const auto profile = ImbalanceProfile::multi_minority(4, 0, 0.97);
    const Sea4Generator gen(Sea4Config{}, profile);
    std::vector<std::int64_t> counts(4, 0);
    for (int i = 0; i < n; ++i) ++counts[*gen.sample(rng, 0).y];
    CHECK(std::fabs(double(counts[0]) / n - 0.97) < 0.01);
    CHECK(chi2(counts, profile.priors, n) < kChi2Df3);
  }

  SUBCASE("balanced circles10") {
    const Circles10Generator gen(Circles10Config::defaults(),
                                 ImbalanceProfile::balanced(10));
    std::vector<std::int64_t> counts(10, 0);
    for (int i = 0; i < n; ++i) ++counts[*gen.sample(rng, 0).y];
    CHECK(chi2(counts, std::vector<double>(10, 0.1), n) < kChi2Df9);
  }
}

TEST_CASE("circles10 points fall inside their class disc") {
  auto cfg = Circles10Config::defaults();
  cfg.drift_step = 1000;
  const Circles10Generator gen(cfg, ImbalanceProfile::balanced(10));
  Rng rng(11);

  for (int c = 0; c < 10; ++c) {
    for (int i = 0; i < 300; ++i) {
      const Instance inst = gen.sample_class(rng, c, 0);
      CHECK(*inst.y == c);
      const double x = inst.x[0] * 15.0, y = inst.x[1] * 15.0;
      const Circle& circ = cfg.circles[c];
      const double d = std::hypot(x - circ.cx, y - circ.cy);
      CHECK(d <= circ.r + 1e-9);
    }
    // after drift: drifted geometry, small slack for the boundary clamp
    for (int i = 0; i < 300; ++i) {
      const Instance inst = gen.sample_class(rng, c, 1000);
      const double x = inst.x[0] * 15.0, y = inst.x[1] * 15.0;
      const Circle& circ = cfg.drifted_circles[c];
      const double d = std::hypot(x - circ.cx, y - circ.cy);
      CHECK(d <= circ.r + 0.2);
    }
  }
}

TEST_CASE("circles10 drift changes the geometry") {
  const auto cfg = Circles10Config::defaults();
  int scaled = 0, moved = 0;
  for (int c = 0; c < 10; ++c) {
    const auto& before = cfg.circles[c];
    const auto& after = cfg.drifted_circles[c];
    if (after.r == doctest::Approx(before.r * 1.5)) ++scaled;
    if (after.cx == doctest::Approx(before.cx + 1.0) &&
        after.cy == doctest::Approx(before.cy + 1.0))
      ++moved;
  }
  CHECK(scaled == 4);
  CHECK(moved == 6);
}

TEST_CASE("initial labelled set is balanced and drawn pre-drift") {
  Sea4Config cfg;
  cfg.drift_step = 50;
  const Sea4Generator gen(cfg, ImbalanceProfile::multi_minority(4, 0, 0.97));
  Rng rng(3);
  const auto initial = make_initial_labelled(rng, gen, 5);
  REQUIRE(initial.size() == 20);
  std::map<int, int> per_class;
  for (const auto& inst : initial) {
    REQUIRE(inst.y.has_value());
    CHECK(inst.t == 0);
    ++per_class[*inst.y];
    // initial concept, not the drifted one
    CHECK(sea4_label(inst.x[0] * 10.0, inst.x[1] * 10.0, cfg, 0) == *inst.y);
  }
  for (int c = 0; c < 4; ++c) CHECK(per_class[c] == 5);

  CHECK_THROWS_AS(make_initial_labelled(rng, gen, 1), std::invalid_argument);
}

TEST_CASE("same seed reproduces the same stream") {
  const Sea4Generator gen(Sea4Config{}, ImbalanceProfile::balanced(4));
  Rng r1(99), r2(99);
  for (int t = 0; t < 200; ++t) {
    const Instance a = gen.sample(r1, t);
    const Instance b = gen.sample(r2, t);
    CHECK(a.x == b.x);
    CHECK(*a.y == *b.y);
  }
}

}  // TEST_SUITE
