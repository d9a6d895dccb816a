#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "actis/active.hpp"
#include "actis/memory.hpp"
#include "actis/nn.hpp"
#include "actis/rng.hpp"
#include "actis/stream.hpp"

namespace actis {

// Shared base-classifier constants: three hidden 32-neuron layers and
// mini-batches of 64, one training epoch per time step.
inline constexpr int kHiddenWidth = 32;
inline constexpr int kHiddenDepth = 3;
inline constexpr int kMiniBatch = 64;

enum class StrategyKind { Fixed, Variable };

// Provides the true label of the instance currently under consideration.
// Returning nullopt means the oracle failed; the step is then abandoned and
// the budget is not charged.
class LabelOracle {
 public:
  virtual ~LabelOracle() = default;
  virtual std::optional<int> reveal() = 0;
};

// Harness/test oracle: reveals a preset truth and counts every reveal, which
// is what the label-hygiene audit checks against the budget.
class CountingOracle : public LabelOracle {
 public:
  void set_truth(std::optional<int> y) { truth_ = y; }
  std::optional<int> reveal() override {
    ++reveals_;
    return truth_;
  }
  std::int64_t reveals() const { return reveals_; }

 private:
  std::optional<int> truth_;
  std::int64_t reveals_ = 0;
};

struct StepOutcome {
  int prediction = -1;
  bool queried = false;
  bool trained = false;
  double criterion = 0.0;
};

struct LearnerHyper {
  double lr = 0.01;
  double leaky_slope = 0.01;
  StrategyKind strategy = StrategyKind::Variable;
  double theta0 = 1.0;
  double theta_fixed = 0.9;
  double step_size = 0.01;  // s
  double delta = 1.0;
  BudgetMechanism mechanism = BudgetMechanism::WindowApprox;
  double budget = 0.05;  // B
  int window = 300;      // w
  int queue_capacity = 5;  // E
};

// Strategy dispatch shared by all learners.
class QueryGate {
 public:
  explicit QueryGate(const LearnerHyper& h)
      : kind_(h.strategy),
        variable_(h.theta0, h.step_size, h.delta),
        theta_fixed_(h.theta_fixed) {}

  bool should_query(double criterion, Rng& rng) {
    if (kind_ == StrategyKind::Fixed)
      return should_query_fixed(theta_fixed_, criterion);
    return variable_.should_query(criterion, rng);
  }

  const VariableUncertaintyStrategy& variable() const { return variable_; }

 private:
  StrategyKind kind_;
  VariableUncertaintyStrategy variable_;
  double theta_fixed_;
};

// ---------------------------------------------------------------------------

// Twin embedding trunk with shared weights plus a similarity head: the
// element-wise absolute difference of the two embeddings feeds one sigmoid
// unit, giving p(same class | x1, x2) in (0,1).
class SiameseNet {
 public:
  SiameseNet(int input_dim, double leaky_slope, Rng& rng);

  int input_dim() const { return trunk_.input_dim(); }
  int embed_dim() const { return trunk_.output_dim(); }

  void embed(std::span<const double> x, std::span<double> out) const;
  double similarity(std::span<const double> x1, std::span<const double> x2) const;
  double similarity_of_embeddings(std::span<const double> e1,
                                  std::span<const double> e2) const;

  struct PairCache {
    ForwardCache fa, fb, fhead;
    std::vector<double> diff;  // e1 - e2, signed
    std::vector<double> dvec;  // |e1 - e2|
    double p = 0.0;
  };
  struct Grads {
    Gradients trunk, head;
    Grads() = default;
    explicit Grads(const SiameseNet& net)
        : trunk(net.trunk_), head(net.head_) {}
    void zero() {
      trunk.zero();
      head.zero();
    }
    void scale(double a) {
      trunk.scale(a);
      head.scale(a);
    }
    std::vector<std::span<const double>> views() const;
  };

  double pair_forward(std::span<const double> x1, std::span<const double> x2,
                      PairCache& cache) const;
  // dz = dL/d(head pre-activation) = p - target for sigmoid + BCE.
  // Both twins accumulate into the same trunk gradients (shared weights).
  void pair_backward(double dz, const PairCache& cache, Grads& grads) const;

  std::vector<std::span<double>> param_views();
  Mlp& trunk() { return trunk_; }
  Mlp& head() { return head_; }
  const Mlp& trunk() const { return trunk_; }
  const Mlp& head() const { return head_; }

 private:
  Mlp trunk_;  // input -> three hidden LeakyReLU layers of kHiddenWidth
  Mlp head_;   // embed_dim -> 1, sigmoid
  mutable ForwardCache scratch_a_, scratch_b_, scratch_head_;
  mutable std::vector<double> scratch_dvec_;
};

// ---------------------------------------------------------------------------

class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;
  virtual int predict(const Instance& x) = 0;
  virtual StepOutcome step(const Instance& x, LabelOracle& oracle) = 0;
  virtual std::string name() const = 0;
  // Seeds the memory, if the learner has one. No offline training happens
  // here; the stored instances only serve prediction until queries arrive.
  virtual void init_store(const std::vector<Instance>& labelled) {
    (void)labelled;
  }
};

struct SimilarityPrediction {
  int cls = 0;
  std::vector<double> mean_per_class;
  std::vector<double> max_per_class;
};

// Class with the highest average similarity to its queue elements, ties
// broken by the lowest class index. sim(cls, index_in_queue, instance) must
// return a value in [0,1]. Throws std::logic_error on an empty queue.
template <typename SimFn>
SimilarityPrediction predict_by_similarity(const QueueStore& store, SimFn&& sim) {
  const int num_classes = store.num_classes();
  if (store.min_queue_size() == 0)
    throw std::logic_error("predict_by_similarity: store has an empty queue");
  SimilarityPrediction out;
  out.mean_per_class.assign(num_classes, 0.0);
  out.max_per_class.assign(num_classes, 0.0);
  for (int c = 0; c < num_classes; ++c) {
    const auto& q = store.queue(c);
    double sum = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double s = sim(c, i, q[i]);
      sum += s;
      mx = std::max(mx, s);
    }
    out.mean_per_class[c] = sum / static_cast<double>(q.size());
    out.max_per_class[c] = mx;
  }
  out.cls = 0;
  for (int c = 1; c < num_classes; ++c)
    if (out.mean_per_class[c] > out.mean_per_class[out.cls]) out.cls = c;
  return out;
}

// The proposed method: siamese prediction over the queue store, similarity
// query criterion, pair training on query.
class ActiSiameseLearner : public OnlineLearner {
 public:
  ActiSiameseLearner(int input_dim, int num_classes, const LearnerHyper& hyper,
                     std::uint64_t weights_seed, std::uint64_t strategy_seed,
                     std::uint64_t pairs_seed);

  void init_store(const std::vector<Instance>& labelled) override;

  int predict(const Instance& x) override;
  StepOutcome step(const Instance& x, LabelOracle& oracle) override;
  std::string name() const override { return "actisiamese"; }

  const QueueStore& store() const { return store_; }
  const SiameseNet& net() const { return net_; }
  const BudgetMeter& budget() const { return budget_; }
  std::int64_t optimizer_steps() const { return opt_.steps(); }

 private:
  SimilarityPrediction predict_full(const Instance& x);
  void refresh_embeddings();
  void train_once();

  int num_classes_;
  LearnerHyper hyper_;
  SiameseNet net_;
  QueueStore store_;
  QueryGate gate_;
  BudgetMeter budget_;
  RAdam opt_;
  Rng strategy_rng_, pairs_rng_;
  SiameseNet::Grads grads_;
  SiameseNet::PairCache pair_cache_;
  // cached embeddings of the stored instances, rebuilt after training or
  // queue changes
  std::vector<double> store_embeds_;
  std::vector<std::size_t> class_offset_;
  bool embeds_dirty_ = true;
  std::vector<double> query_embed_, head_in_;
};

// Same harness as the siamese learner but with a plain softmax classifier:
// queue store, max-probability criterion, one epoch over all stored examples
// per query.
class ActiQLearner : public OnlineLearner {
 public:
  ActiQLearner(int input_dim, int num_classes, const LearnerHyper& hyper,
               std::uint64_t weights_seed, std::uint64_t strategy_seed,
               std::uint64_t pairs_seed);

  void init_store(const std::vector<Instance>& labelled) override;

  int predict(const Instance& x) override;
  StepOutcome step(const Instance& x, LabelOracle& oracle) override;
  std::string name() const override { return "actiq"; }

  const QueueStore& store() const { return store_; }
  const BudgetMeter& budget() const { return budget_; }
  std::int64_t optimizer_steps() const { return opt_.steps(); }

 private:
  struct Pred {
    int cls;
    double p_max;
  };
  Pred predict_full(const Instance& x);
  void train_once();

  int num_classes_;
  LearnerHyper hyper_;
  Mlp net_;
  QueueStore store_;
  QueryGate gate_;
  BudgetMeter budget_;
  RAdam opt_;
  Rng strategy_rng_, shuffle_rng_;
  Gradients grads_;
  ForwardCache cache_;
  std::vector<double> delta_;
};

// One-pass baseline: no store, trains on the most recent queried instance
// only and then discards it.
class IncrementalLearner : public OnlineLearner {
 public:
  IncrementalLearner(int input_dim, int num_classes, const LearnerHyper& hyper,
                     std::uint64_t weights_seed, std::uint64_t strategy_seed);

  int predict(const Instance& x) override;
  StepOutcome step(const Instance& x, LabelOracle& oracle) override;
  std::string name() const override { return "incremental"; }

  const BudgetMeter& budget() const { return budget_; }
  std::int64_t optimizer_steps() const { return opt_.steps(); }

 private:
  int num_classes_;
  LearnerHyper hyper_;
  Mlp net_;
  QueryGate gate_;
  BudgetMeter budget_;
  RAdam opt_;
  Rng strategy_rng_;
  Gradients grads_;
  ForwardCache cache_;
  std::vector<double> delta_;
};

// ---------------------------------------------------------------------------

enum class LearnerKind { Incremental, ActiQ, ActiSiamese };

std::string learner_name(LearnerKind kind);
LearnerKind learner_from_name(const std::string& name);  // throws on unknown

// Builds a learner with per-purpose rng sub-streams derived from the seeds.
// ActiQ and ActiSiamese must have init_store() called before stepping.
std::unique_ptr<OnlineLearner> make_learner(LearnerKind kind, int input_dim,
                                            int num_classes,
                                            const LearnerHyper& hyper,
                                            std::uint64_t weights_seed,
                                            std::uint64_t strategy_seed,
                                            std::uint64_t pairs_seed);

}  // namespace actis
