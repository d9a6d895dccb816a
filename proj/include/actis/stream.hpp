#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "actis/rng.hpp"

namespace actis {

// One stream element: normalized features, optional true label, arrival step.
struct Instance {
  std::vector<double> x;
  std::optional<int> y;
  std::int64_t t = 0;
};

// Class priors p(y) for the generator.
struct ImbalanceProfile {
  std::vector<double> priors;

  static ImbalanceProfile balanced(int num_classes);
  // One class at p_major, the rest sharing the remainder equally.
  static ImbalanceProfile multi_minority(int num_classes, int majority_class,
                                         double p_major);

  void validate() const;  // throws std::invalid_argument
  int sample_class(Rng& rng) const;
  int num_classes() const { return static_cast<int>(priors.size()); }
};

// ---------------------------------------------------------------------------
// sea4: two features in [0,10]^2, four classes split by thresholds on x1+x2,
// normalized to the unit square. Abrupt drift swaps the threshold triple.

struct Sea4Config {
  std::array<double, 3> thresholds{3.0, 5.0, 7.0};
  std::array<double, 3> drifted_thresholds{2.0, 6.0, 8.0};
  std::optional<std::int64_t> drift_step;

  void validate() const;  // triples must satisfy 0 < t1 < t2 < t3 < 10
};

// Class of a raw point under the triple active at step t. Lower boundaries
// are inclusive. Throws std::domain_error outside [0,10]^2.
int sea4_label(double x1_raw, double x2_raw, const Sea4Config& cfg,
               std::int64_t t);

// Class-conditional draw: pick a class from the priors, rejection-sample a
// raw point in that class region, normalize by 10.
Instance sample_sea4(Rng& rng, const Sea4Config& cfg,
                     const ImbalanceProfile& profile, std::int64_t t);

// ---------------------------------------------------------------------------
// circles10: two features in [0,15]^2, ten classes, one disc per class.
// Overlapping discs make the labels noisy on purpose.

struct Circle {
  double cx = 0.0, cy = 0.0, r = 1.0;
};

struct Circles10Config {
  std::array<Circle, 10> circles;
  std::array<Circle, 10> drifted_circles;
  std::optional<std::int64_t> drift_step;

  // Ten radius-2 discs on a loosely perturbed grid over [2,13]^2, with one
  // extra disc overlapping its neighbours. Drift widens the four corner
  // discs by x1.5 and shifts every other disc by (+1,+1).
  static Circles10Config defaults();

  void validate() const;
};

// Draw a class, sample uniformly inside its disc (polar method), clamp to
// [0,15]^2, normalize by 15.
Instance sample_circles10(Rng& rng, const Circles10Config& cfg,
                          const ImbalanceProfile& profile, std::int64_t t);

// ---------------------------------------------------------------------------

class StreamGenerator {
 public:
  virtual ~StreamGenerator() = default;
  virtual Instance sample(Rng& rng, std::int64_t t) const = 0;
  // Class-conditional draw, independent of the priors.
  virtual Instance sample_class(Rng& rng, int cls, std::int64_t t) const = 0;
  virtual int num_classes() const = 0;
  virtual int dims() const = 0;
};

class Sea4Generator : public StreamGenerator {
 public:
  Sea4Generator(Sea4Config cfg, ImbalanceProfile profile);
  Instance sample(Rng& rng, std::int64_t t) const override;
  Instance sample_class(Rng& rng, int cls, std::int64_t t) const override;
  int num_classes() const override { return 4; }
  int dims() const override { return 2; }
  const Sea4Config& config() const { return cfg_; }

 private:
  Sea4Config cfg_;
  ImbalanceProfile profile_;
};

class Circles10Generator : public StreamGenerator {
 public:
  Circles10Generator(Circles10Config cfg, ImbalanceProfile profile);
  Instance sample(Rng& rng, std::int64_t t) const override;
  Instance sample_class(Rng& rng, int cls, std::int64_t t) const override;
  int num_classes() const override { return 10; }
  int dims() const override { return 2; }
  const Circles10Config& config() const { return cfg_; }

 private:
  Circles10Config cfg_;
  ImbalanceProfile profile_;
};

// E labelled instances per class, drawn at the t=0 concept. Throws
// std::invalid_argument for E < 2 (pair preparation needs two per class).
std::vector<Instance> make_initial_labelled(Rng& rng,
                                            const StreamGenerator& gen,
                                            int per_class);

}  // namespace actis
