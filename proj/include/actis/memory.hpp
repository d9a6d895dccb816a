#pragma once

#include <vector>

#include "actis/rng.hpp"
#include "actis/stream.hpp"

namespace actis {

// K bounded FIFO queues of labelled instances, one per class, capacity E
// each. Appending to a full queue evicts the oldest element, so the queues
// behave like per-class sliding windows and stay balanced.
class QueueStore {
 public:
  QueueStore(int num_classes, int capacity);

  // Throws std::domain_error if the instance carries no label.
  void append(const Instance& inst);

  int num_classes() const { return static_cast<int>(queues_.size()); }
  int capacity() const { return capacity_; }
  // Oldest first; most recent arrival is last.
  const std::vector<Instance>& queue(int cls) const { return queues_.at(cls); }
  std::size_t total() const;
  int min_queue_size() const;

  // Flat read-only view grouped by class, queue order preserved.
  std::vector<const Instance*> snapshot() const;

 private:
  std::vector<std::vector<Instance>> queues_;
  int capacity_;
};

struct TrainingPair {
  Instance a, b;
  int target = 0;  // 1 iff same class
};

struct PairSet {
  std::vector<TrainingPair> pairs;
};

// Builds the balanced training pairs from the store:
//   positives = one identical pair per stored element
//               + every unordered distinct same-class pair
//   negatives = every unordered cross-class pair
// The larger side is uniformly downsampled to the smaller and the union is
// shuffled. Throws std::invalid_argument if any queue has fewer than two
// elements (there would be no distinct same-class pairs).
PairSet prepare_pairs(const QueueStore& store, Rng& rng);

}  // namespace actis
