#include "actis/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "actis/kernels.hpp"

namespace actis {

namespace {

std::vector<LayerSpec> trunk_spec(int input_dim) {
  std::vector<LayerSpec> layers;
  int in = input_dim;
  for (int i = 0; i < kHiddenDepth; ++i) {
    layers.push_back({in, kHiddenWidth, Activation::LeakyRelu});
    in = kHiddenWidth;
  }
  return layers;
}

std::vector<LayerSpec> classifier_spec(int input_dim, int num_classes) {
  auto layers = trunk_spec(input_dim);
  layers.push_back({kHiddenWidth, num_classes, Activation::Softmax});
  return layers;
}

Mlp make_classifier(int input_dim, int num_classes, double slope,
                    std::uint64_t seed) {
  Rng rng(seed);
  return Mlp(classifier_spec(input_dim, num_classes), slope, rng);
}

SiameseNet make_siamese(int input_dim, double slope, std::uint64_t seed) {
  Rng rng(seed);
  return SiameseNet(input_dim, slope, rng);
}

RAdamConfig optimizer_config(const LearnerHyper& hyper) {
  RAdamConfig cfg;
  cfg.lr = hyper.lr;
  return cfg;
}

int argmax_lowest(std::span<const double> v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// SiameseNet

SiameseNet::SiameseNet(int input_dim, double leaky_slope, Rng& rng)
    : trunk_(trunk_spec(input_dim), leaky_slope, rng),
      head_({{kHiddenWidth, 1, Activation::Sigmoid}}, leaky_slope, rng) {}

void SiameseNet::embed(std::span<const double> x, std::span<double> out) const {
  const auto& e = forward(trunk_, x, scratch_a_);
  std::copy(e.begin(), e.end(), out.begin());
}

double SiameseNet::similarity(std::span<const double> x1,
                              std::span<const double> x2) const {
  const auto& e1 = forward(trunk_, x1, scratch_a_);
  const auto& e2 = forward(trunk_, x2, scratch_b_);
  return similarity_of_embeddings(e1, e2);
}

double SiameseNet::similarity_of_embeddings(std::span<const double> e1,
                                            std::span<const double> e2) const {
  const std::size_t n = e1.size();
  scratch_dvec_.resize(n);
  kern::ops().abs_diff(n, e1.data(), e2.data(), scratch_dvec_.data());
  return forward(head_, scratch_dvec_, scratch_head_)[0];
}

double SiameseNet::pair_forward(std::span<const double> x1,
                                std::span<const double> x2,
                                PairCache& cache) const {
  const auto& e1 = forward(trunk_, x1, cache.fa);
  const auto& e2 = forward(trunk_, x2, cache.fb);
  const std::size_t n = e1.size();
  cache.diff.resize(n);
  cache.dvec.resize(n);
  for (std::size_t i = 0; i < n; ++i) cache.diff[i] = e1[i] - e2[i];
  kern::ops().abs_diff(n, e1.data(), e2.data(), cache.dvec.data());
  cache.p = forward(head_, cache.dvec, cache.fhead)[0];
  return cache.p;
}

void SiameseNet::pair_backward(double dz, const PairCache& cache,
                               Grads& grads) const {
  const double delta[1] = {dz};
  std::vector<double> ddvec;
  backward(head_, cache.fhead, std::span<const double>(delta, 1), grads.head,
           &ddvec);

  // d|e1-e2|/de1 = sign(e1-e2), zero at the tie so identical pairs leave the
  // trunk untouched.
  const std::size_t n = cache.diff.size();
  std::vector<double> de(n), dza(n), dzb(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = cache.diff[i];
    de[i] = d > 0.0 ? ddvec[i] : (d < 0.0 ? -ddvec[i] : 0.0);
  }
  const auto& ops = kern::ops();
  const double slope = trunk_.leaky_slope();
  ops.leaky_relu_bwd(n, slope, cache.fa.pre.back().data(), de.data(),
                     dza.data());
  for (std::size_t i = 0; i < n; ++i) de[i] = -de[i];
  ops.leaky_relu_bwd(n, slope, cache.fb.pre.back().data(), de.data(),
                     dzb.data());

  backward(trunk_, cache.fa, dza, grads.trunk);
  backward(trunk_, cache.fb, dzb, grads.trunk);
}

std::vector<std::span<double>> SiameseNet::param_views() {
  auto views = trunk_.param_views();
  auto head = head_.param_views();
  views.insert(views.end(), head.begin(), head.end());
  return views;
}

std::vector<std::span<const double>> SiameseNet::Grads::views() const {
  auto v = trunk.views();
  auto h = head.views();
  v.insert(v.end(), h.begin(), h.end());
  return v;
}

// ---------------------------------------------------------------------------
// ActiSiameseLearner

ActiSiameseLearner::ActiSiameseLearner(int input_dim, int num_classes,
                                       const LearnerHyper& hyper,
                                       std::uint64_t weights_seed,
                                       std::uint64_t strategy_seed,
                                       std::uint64_t pairs_seed)
    : num_classes_(num_classes),
      hyper_(hyper),
      net_(make_siamese(input_dim, hyper.leaky_slope, weights_seed)),
      store_(num_classes, hyper.queue_capacity),
      gate_(hyper),
      budget_(hyper.mechanism, hyper.budget, hyper.window),
      opt_(optimizer_config(hyper)),
      strategy_rng_(strategy_seed),
      pairs_rng_(pairs_seed),
      grads_(net_) {}

void ActiSiameseLearner::init_store(const std::vector<Instance>& labelled) {
  for (const auto& inst : labelled) store_.append(inst);
  embeds_dirty_ = true;
}

void ActiSiameseLearner::refresh_embeddings() {
  const int ed = net_.embed_dim();
  class_offset_.assign(num_classes_ + 1, 0);
  for (int c = 0; c < num_classes_; ++c)
    class_offset_[c + 1] = class_offset_[c] + store_.queue(c).size();
  store_embeds_.resize(class_offset_.back() * ed);
  for (int c = 0; c < num_classes_; ++c) {
    const auto& q = store_.queue(c);
    for (std::size_t i = 0; i < q.size(); ++i)
      net_.embed(q[i].x, std::span<double>(
                             &store_embeds_[(class_offset_[c] + i) * ed], ed));
  }
  embeds_dirty_ = false;
}

SimilarityPrediction ActiSiameseLearner::predict_full(const Instance& x) {
  if (embeds_dirty_) refresh_embeddings();
  const int ed = net_.embed_dim();
  query_embed_.resize(ed);
  net_.embed(x.x, query_embed_);
  return predict_by_similarity(
      store_, [&](int c, std::size_t i, const Instance&) {
        const double* e = &store_embeds_[(class_offset_[c] + i) * ed];
        return net_.similarity_of_embeddings(
            query_embed_, std::span<const double>(e, ed));
      });
}

int ActiSiameseLearner::predict(const Instance& x) {
  return predict_full(x).cls;
}

StepOutcome ActiSiameseLearner::step(const Instance& x, LabelOracle& oracle) {
  const SimilarityPrediction pred = predict_full(x);
  StepOutcome out;
  out.prediction = pred.cls;
  out.criterion = pred.max_per_class[pred.cls];
  // The strategy is only consulted (and its threshold only adapted) while
  // spending is under budget.
  if (budget_.within_budget() &&
      gate_.should_query(out.criterion, strategy_rng_)) {
    const std::optional<int> y = oracle.reveal();
    if (y.has_value()) {
      Instance labelled = x;
      labelled.y = y;
      store_.append(labelled);
      embeds_dirty_ = true;
      train_once();
      out.queried = true;
      out.trained = true;
    }
  }
  budget_.record(out.queried);
  return out;
}

void ActiSiameseLearner::train_once() {
  const PairSet ps = prepare_pairs(store_, pairs_rng_);
  const auto params = net_.param_views();
  const std::size_t n = ps.pairs.size();
  for (std::size_t start = 0; start < n; start += kMiniBatch) {
    const std::size_t end = std::min(n, start + kMiniBatch);
    grads_.zero();
    for (std::size_t i = start; i < end; ++i) {
      const TrainingPair& pr = ps.pairs[i];
      const double p = net_.pair_forward(pr.a.x, pr.b.x, pair_cache_);
      net_.pair_backward(p - pr.target, pair_cache_, grads_);
    }
    grads_.scale(1.0 / static_cast<double>(end - start));
    opt_.step(params, grads_.views());
  }
  embeds_dirty_ = true;
}

// ---------------------------------------------------------------------------
// ActiQLearner

ActiQLearner::ActiQLearner(int input_dim, int num_classes,
                           const LearnerHyper& hyper,
                           std::uint64_t weights_seed,
                           std::uint64_t strategy_seed,
                           std::uint64_t pairs_seed)
    : num_classes_(num_classes),
      hyper_(hyper),
      net_(make_classifier(input_dim, num_classes, hyper.leaky_slope,
                           weights_seed)),
      store_(num_classes, hyper.queue_capacity),
      gate_(hyper),
      budget_(hyper.mechanism, hyper.budget, hyper.window),
      opt_(optimizer_config(hyper)),
      strategy_rng_(strategy_seed),
      shuffle_rng_(pairs_seed),
      grads_(net_) {}

void ActiQLearner::init_store(const std::vector<Instance>& labelled) {
  for (const auto& inst : labelled) store_.append(inst);
}

ActiQLearner::Pred ActiQLearner::predict_full(const Instance& x) {
  const auto& p = forward(net_, x.x, cache_);
  const int cls = argmax_lowest(p);
  return {cls, p[cls]};
}

int ActiQLearner::predict(const Instance& x) { return predict_full(x).cls; }

StepOutcome ActiQLearner::step(const Instance& x, LabelOracle& oracle) {
  const Pred pred = predict_full(x);
  StepOutcome out;
  out.prediction = pred.cls;
  out.criterion = pred.p_max;
  if (budget_.within_budget() &&
      gate_.should_query(out.criterion, strategy_rng_)) {
    const std::optional<int> y = oracle.reveal();
    if (y.has_value()) {
      Instance labelled = x;
      labelled.y = y;
      store_.append(labelled);
      train_once();
      out.queried = true;
      out.trained = true;
    }
  }
  budget_.record(out.queried);
  return out;
}

void ActiQLearner::train_once() {
  const std::vector<const Instance*> snap = store_.snapshot();
  std::vector<std::size_t> order(snap.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order, shuffle_rng_);

  const auto params = net_.param_views();
  delta_.resize(num_classes_);
  const std::size_t n = order.size();
  for (std::size_t start = 0; start < n; start += kMiniBatch) {
    const std::size_t end = std::min(n, start + kMiniBatch);
    grads_.zero();
    for (std::size_t i = start; i < end; ++i) {
      const Instance& inst = *snap[order[i]];
      const auto& p = forward(net_, inst.x, cache_);
      delta_softmax_cce(p, *inst.y, delta_);
      backward(net_, cache_, delta_, grads_);
    }
    grads_.scale(1.0 / static_cast<double>(end - start));
    opt_.step(params, grads_.views());
  }
}

// ---------------------------------------------------------------------------
// IncrementalLearner

IncrementalLearner::IncrementalLearner(int input_dim, int num_classes,
                                       const LearnerHyper& hyper,
                                       std::uint64_t weights_seed,
                                       std::uint64_t strategy_seed)
    : num_classes_(num_classes),
      hyper_(hyper),
      net_(make_classifier(input_dim, num_classes, hyper.leaky_slope,
                           weights_seed)),
      gate_(hyper),
      budget_(hyper.mechanism, hyper.budget, hyper.window),
      opt_(optimizer_config(hyper)),
      strategy_rng_(strategy_seed),
      grads_(net_) {
  if (num_classes < 2)
    throw std::invalid_argument("learner: need at least two classes");
}

int IncrementalLearner::predict(const Instance& x) {
  return argmax_lowest(forward(net_, x.x, cache_));
}

StepOutcome IncrementalLearner::step(const Instance& x, LabelOracle& oracle) {
  const auto& p = forward(net_, x.x, cache_);
  StepOutcome out;
  out.prediction = argmax_lowest(p);
  out.criterion = p[out.prediction];
  if (budget_.within_budget() &&
      gate_.should_query(out.criterion, strategy_rng_)) {
    const std::optional<int> y = oracle.reveal();
    if (y.has_value()) {
      if (*y < 0 || *y >= num_classes_)
        throw std::domain_error("learner: label out of range");
      // cache_ still holds this instance's forward pass
      delta_.resize(num_classes_);
      delta_softmax_cce(cache_.act.back(), *y, delta_);
      grads_.zero();
      backward(net_, cache_, delta_, grads_);
      opt_.step(net_.param_views(), grads_.views());
      out.queried = true;
      out.trained = true;
    }
  }
  budget_.record(out.queried);
  return out;
}

// ---------------------------------------------------------------------------
// Factory

std::string learner_name(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Incremental:
      return "incremental";
    case LearnerKind::ActiQ:
      return "actiq";
    case LearnerKind::ActiSiamese:
      return "actisiamese";
  }
  throw std::logic_error("learner_name: bad kind");
}

LearnerKind learner_from_name(const std::string& name) {
  if (name == "incremental") return LearnerKind::Incremental;
  if (name == "actiq") return LearnerKind::ActiQ;
  if (name == "actisiamese") return LearnerKind::ActiSiamese;
  throw std::invalid_argument("unknown learner: " + name);
}

std::unique_ptr<OnlineLearner> make_learner(LearnerKind kind, int input_dim,
                                            int num_classes,
                                            const LearnerHyper& hyper,
                                            std::uint64_t weights_seed,
                                            std::uint64_t strategy_seed,
                                            std::uint64_t pairs_seed) {
  switch (kind) {
    case LearnerKind::Incremental:
      return std::make_unique<IncrementalLearner>(input_dim, num_classes, hyper,
                                                  weights_seed, strategy_seed);
    case LearnerKind::ActiQ:
      return std::make_unique<ActiQLearner>(input_dim, num_classes, hyper,
                                            weights_seed, strategy_seed,
                                            pairs_seed);
    case LearnerKind::ActiSiamese:
      return std::make_unique<ActiSiameseLearner>(input_dim, num_classes, hyper,
                                                  weights_seed, strategy_seed,
                                                  pairs_seed);
  }
  throw std::logic_error("make_learner: bad kind");
}

}  // namespace actis
