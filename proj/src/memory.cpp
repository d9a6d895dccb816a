#include "actis/memory.hpp"

#include <stdexcept>

namespace actis {

QueueStore::QueueStore(int num_classes, int capacity) : capacity_(capacity) {
  if (num_classes < 2) throw std::invalid_argument("QueueStore: need K >= 2");
  if (capacity < 1) throw std::invalid_argument("QueueStore: need capacity >= 1");
  queues_.resize(num_classes);
  for (auto& q : queues_) q.reserve(capacity);
}

void QueueStore::append(const Instance& inst) {
  if (!inst.y) throw std::domain_error("QueueStore: unlabelled instance");
  const int cls = *inst.y;
  if (cls < 0 || cls >= num_classes())
    throw std::domain_error("QueueStore: label out of range");
  auto& q = queues_[cls];
  if (static_cast<int>(q.size()) == capacity_) q.erase(q.begin());
  q.push_back(inst);
}

std::size_t QueueStore::total() const {
  std::size_t n = 0;
  for (const auto& q : queues_) n += q.size();
  return n;
}

int QueueStore::min_queue_size() const {
  int m = capacity_;
  for (const auto& q : queues_) m = std::min<int>(m, static_cast<int>(q.size()));
  return m;
}

std::vector<const Instance*> QueueStore::snapshot() const {
  std::vector<const Instance*> out;
  out.reserve(total());
  for (const auto& q : queues_)
    for (const auto& inst : q) out.push_back(&inst);
  return out;
}

namespace {

// Uniform sample of k distinct positions from [0, n) via partial
// Fisher-Yates over the index vector.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

PairSet prepare_pairs(const QueueStore& store, Rng& rng) {
  if (store.min_queue_size() < 2)
    throw std::invalid_argument(
        "prepare_pairs: every queue needs at least two elements");

  const auto flat = store.snapshot();
  const std::size_t n = flat.size();

  std::vector<TrainingPair> positives;
  std::vector<TrainingPair> negatives;
  // identical pairs (the diagonal)
  for (std::size_t i = 0; i < n; ++i)
    positives.push_back({*flat[i], *flat[i], 1});
  // unordered pairs of distinct elements
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (*flat[i]->y == *flat[j]->y)
        positives.push_back({*flat[i], *flat[j], 1});
      else
        negatives.push_back({*flat[i], *flat[j], 0});
    }
  }

  auto& larger = positives.size() >= negatives.size() ? positives : negatives;
  auto& smaller = positives.size() >= negatives.size() ? negatives : positives;
  if (larger.size() > smaller.size()) {
    std::vector<TrainingPair> kept;
    kept.reserve(smaller.size());
    for (std::size_t i : sample_indices(larger.size(), smaller.size(), rng))
      kept.push_back(std::move(larger[i]));
    larger.swap(kept);
  }

  PairSet out;
  out.pairs.reserve(positives.size() + negatives.size());
  for (auto& p : positives) out.pairs.push_back(std::move(p));
  for (auto& p : negatives) out.pairs.push_back(std::move(p));
  shuffle(out.pairs, rng);
  return out;
}

}  // namespace actis
