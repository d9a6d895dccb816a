#include "actis/stream.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace actis {

ImbalanceProfile ImbalanceProfile::balanced(int num_classes) {
  ImbalanceProfile p;
  p.priors.assign(num_classes, 1.0 / num_classes);
  return p;
}

ImbalanceProfile ImbalanceProfile::multi_minority(int num_classes,
                                                  int majority_class,
                                                  double p_major) {
  if (majority_class < 0 || majority_class >= num_classes)
    throw std::invalid_argument("majority_class out of range");
  ImbalanceProfile p;
  p.priors.assign(num_classes, (1.0 - p_major) / (num_classes - 1));
  p.priors[majority_class] = p_major;
  return p;
}

void ImbalanceProfile::validate() const {
  if (priors.empty()) throw std::invalid_argument("priors: empty");
  double sum = 0.0;
  for (double v : priors) {
    if (v <= 0.0) throw std::invalid_argument("priors: all entries must be > 0");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("priors: must sum to 1");
}

int ImbalanceProfile::sample_class(Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t c = 0; c + 1 < priors.size(); ++c) {
    acc += priors[c];
    if (u < acc) return static_cast<int>(c);
  }
  return static_cast<int>(priors.size()) - 1;
}

// ---------------------------------------------------------------------------

namespace {

void check_triple(const std::array<double, 3>& t, const char* which) {
  if (!(0.0 < t[0] && t[0] < t[1] && t[1] < t[2] && t[2] < 10.0))
    throw std::invalid_argument(std::string("sea4 ") + which +
                                ": need 0 < t1 < t2 < t3 < 10");
}

}  // namespace

void Sea4Config::validate() const {
  check_triple(thresholds, "thresholds");
  check_triple(drifted_thresholds, "drifted_thresholds");
}

int sea4_label(double x1_raw, double x2_raw, const Sea4Config& cfg,
               std::int64_t t) {
  if (x1_raw < 0.0 || x1_raw > 10.0 || x2_raw < 0.0 || x2_raw > 10.0)
    throw std::domain_error("sea4_label: point outside [0,10]^2");
  const bool drifted = cfg.drift_step && t >= *cfg.drift_step;
  const auto& th = drifted ? cfg.drifted_thresholds : cfg.thresholds;
  const double s = x1_raw + x2_raw;
  if (s < th[0]) return 0;
  if (s < th[1]) return 1;
  if (s < th[2]) return 2;
  return 3;
}

Instance sample_sea4(Rng& rng, const Sea4Config& cfg,
                     const ImbalanceProfile& profile, std::int64_t t) {
  const int cls = profile.sample_class(rng);
  double x1, x2;
  // Every class region has positive area, so this terminates.
  do {
    x1 = rng.uniform(0.0, 10.0);
    x2 = rng.uniform(0.0, 10.0);
  } while (sea4_label(x1, x2, cfg, t) != cls);
  Instance inst;
  inst.x = {x1 / 10.0, x2 / 10.0};
  inst.y = cls;
  inst.t = t;
  return inst;
}

// ---------------------------------------------------------------------------

Circles10Config Circles10Config::defaults() {
  Circles10Config cfg;
  cfg.circles = {{
      {2.9, 2.9, 2.0},    // 0: corner disc (majority class when imbalanced)
      {2.65, 7.0, 2.0},   //    left edge
      {2.7, 12.6, 2.0},   // 2: corner disc
      {6.9, 2.6, 2.0},    //    bottom edge
      {7.5, 7.5, 2.0},    //    centre
      {6.9, 12.45, 2.0},  //    top edge
      {12.3, 2.9, 2.0},   // 6: corner disc
      {12.45, 6.9, 2.0},  //    right edge
      {12.3, 12.3, 2.0},  // 8: corner disc
      {6.0, 9.8, 2.0},    // 9: extra disc, overlaps 4 and 5
  }};
  // Drift: the four corner discs grow in place, everything else moves by
  // (+1,+1). The edge discs sit off-centre so that the grown corners only
  // graze their translated neighbours; both concepts keep a similar amount
  // of class overlap, which is what lets a learner fully recover.
  for (int c = 0; c < 10; ++c) {
    Circle d = cfg.circles[c];
    if (c == 0 || c == 2 || c == 6 || c == 8) {
      d.r *= 1.5;
    } else {
      d.cx += 1.0;
      d.cy += 1.0;
    }
    cfg.drifted_circles[c] = d;
  }
  return cfg;
}

void Circles10Config::validate() const {
  for (const auto* set : {&circles, &drifted_circles}) {
    for (const Circle& c : *set) {
      if (c.r <= 0.0) throw std::invalid_argument("circles10: radius must be > 0");
      if (c.cx < 0.0 || c.cx > 15.0 || c.cy < 0.0 || c.cy > 15.0)
        throw std::invalid_argument("circles10: centre outside [0,15]^2");
    }
  }
}

Instance sample_circles10(Rng& rng, const Circles10Config& cfg,
                          const ImbalanceProfile& profile, std::int64_t t) {
  const int cls = profile.sample_class(rng);
  const bool drifted = cfg.drift_step && t >= *cfg.drift_step;
  const Circle& c = (drifted ? cfg.drifted_circles : cfg.circles)[cls];
  // uniform inside the disc
  const double rad = c.r * std::sqrt(rng.uniform());
  const double ang = 2.0 * 3.14159265358979323846 * rng.uniform();
  double x1 = c.cx + rad * std::cos(ang);
  double x2 = c.cy + rad * std::sin(ang);
  x1 = std::clamp(x1, 0.0, 15.0);
  x2 = std::clamp(x2, 0.0, 15.0);
  Instance inst;
  inst.x = {x1 / 15.0, x2 / 15.0};
  inst.y = cls;
  inst.t = t;
  return inst;
}

// ---------------------------------------------------------------------------

Sea4Generator::Sea4Generator(Sea4Config cfg, ImbalanceProfile profile)
    : cfg_(cfg), profile_(std::move(profile)) {
  cfg_.validate();
  profile_.validate();
  if (profile_.num_classes() != 4)
    throw std::invalid_argument("sea4 needs exactly 4 priors");
}

Instance Sea4Generator::sample(Rng& rng, std::int64_t t) const {
  return sample_sea4(rng, cfg_, profile_, t);
}

Instance Sea4Generator::sample_class(Rng& rng, int cls, std::int64_t t) const {
  if (cls < 0 || cls >= 4)
    throw std::invalid_argument("sea4: class out of range");
  double x1, x2;
  do {
    x1 = rng.uniform(0.0, 10.0);
    x2 = rng.uniform(0.0, 10.0);
  } while (sea4_label(x1, x2, cfg_, t) != cls);
  Instance inst;
  inst.x = {x1 / 10.0, x2 / 10.0};
  inst.y = cls;
  inst.t = t;
  return inst;
}

Circles10Generator::Circles10Generator(Circles10Config cfg,
                                       ImbalanceProfile profile)
    : cfg_(cfg), profile_(std::move(profile)) {
  cfg_.validate();
  profile_.validate();
  if (profile_.num_classes() != 10)
    throw std::invalid_argument("circles10 needs exactly 10 priors");
}

Instance Circles10Generator::sample(Rng& rng, std::int64_t t) const {
  return sample_circles10(rng, cfg_, profile_, t);
}

Instance Circles10Generator::sample_class(Rng& rng, int cls,
                                          std::int64_t t) const {
  if (cls < 0 || cls >= 10)
    throw std::invalid_argument("circles10: class out of range");
  const bool drifted = cfg_.drift_step && t >= *cfg_.drift_step;
  const Circle& c = (drifted ? cfg_.drifted_circles : cfg_.circles)[cls];
  const double rad = c.r * std::sqrt(rng.uniform());
  const double ang = 2.0 * 3.14159265358979323846 * rng.uniform();
  Instance inst;
  inst.x = {std::clamp(c.cx + rad * std::cos(ang), 0.0, 15.0) / 15.0,
            std::clamp(c.cy + rad * std::sin(ang), 0.0, 15.0) / 15.0};
  inst.y = cls;
  inst.t = t;
  return inst;
}

std::vector<Instance> make_initial_labelled(Rng& rng,
                                            const StreamGenerator& gen,
                                            int per_class) {
  if (per_class < 2)
    throw std::invalid_argument(
        "initial labelled set needs at least two examples per class");
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(gen.num_classes()) * per_class);
  for (int c = 0; c < gen.num_classes(); ++c) {
    for (int i = 0; i < per_class; ++i) {
      out.push_back(gen.sample_class(rng, c, 0));
    }
  }
  return out;
}

}  // namespace actis
