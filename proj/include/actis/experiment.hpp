#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "actis/config.hpp"
#include "actis/eval.hpp"
#include "actis/learners.hpp"
#include "actis/stream.hpp"

namespace actis {

enum class PriorProfile { Balanced, MultiMinority };

// The full experiment description. Every field maps 1:1 to a config key of
// the same name (budget=B, queue_capacity=E, step_size=s, window=w use the
// short names in config files).
struct ExperimentConfig {
  std::string dataset = "sea4";  // sea4 | circles10
  PriorProfile priors = PriorProfile::Balanced;
  int majority_class = 0;
  // Majority prior under multi_minority; -1 picks the dataset default
  // (0.97 for sea4, 0.955 for circles10).
  double p_major = -1.0;
  std::int64_t drift_step = -1;  // -1 = stationary
  std::int64_t horizon = 5000;   // T
  std::vector<LearnerKind> learners = {
      LearnerKind::Incremental, LearnerKind::ActiQ, LearnerKind::ActiSiamese};
  double budget = 0.05;    // B
  int queue_capacity = 5;  // E
  int repetitions = 30;
  std::uint64_t seed = 7;
  StrategyKind strategy = StrategyKind::Variable;
  double theta0 = 1.0;
  double theta_fixed = 0.9;
  double step_size = 0.01;  // s
  double delta = 1.0;
  BudgetMechanism mechanism = BudgetMechanism::WindowApprox;
  int window = 300;  // w
  double fading = 0.99;
  double lr = 0.01;
  double leaky_slope = 0.01;
  int threads = 1;

  // Unknown keys raise std::runtime_error naming the key.
  static ExperimentConfig from_kv(const KvMap& kv);
  KvMap to_kv() const;
  void validate() const;  // throws std::invalid_argument
  // Alphabetical key=value lines of every result-affecting field; threads is
  // excluded because it never changes the output.
  std::string canonical() const;
  std::string hash() const;  // FNV-1a 64 of canonical(), 16 hex chars
  LearnerHyper hyper() const;
  double resolved_p_major() const;
};

struct RunRecord {
  std::string config_hash;
  std::uint64_t seed = 0;  // base seed + repetition
  std::string learner;
  double final_gmean = 0.0;
  std::string curve_ref;  // relative path of the per-repetition curve CSV
  std::int64_t queries = 0;
};

struct LearnerResult {
  LearnerKind kind = LearnerKind::Incremental;
  std::vector<std::vector<double>> curves;  // [repetition][step]
  AggregateCurve aggregate;
  std::vector<RunRecord> records;  // one per repetition
};

struct ExperimentResult {
  ExperimentConfig cfg;
  std::string config_hash;
  std::vector<LearnerResult> learners;
};

std::unique_ptr<StreamGenerator> make_generator(const ExperimentConfig& cfg);

// Runs repetitions x learners. Within one repetition every learner sees the
// same pregenerated stream and the same initial labelled set; weights,
// strategy noise and pair sampling use per-learner sub-seeds.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct SweepRow {
  double budget = 0.0;
  std::string learner;
  double mean_final = 0.0;
  double se_final = 0.0;
  int n = 0;
};

// One experiment per budget value. The grid must lie in [0,1] and include
// 1.0, the fully supervised reference. on_result (optional) receives each
// finished experiment, e.g. to write its outputs.
std::vector<SweepRow> sweep_budget(
    const ExperimentConfig& cfg, const std::vector<double>& budgets,
    const std::function<void(const ExperimentResult&)>& on_result = {});

// Reveal-count ceiling B*T + w: the window mechanisms can overspend by at
// most one window before the estimate catches up.
double max_allowed_queries(const ExperimentConfig& cfg);
bool respects_budget(const RunRecord& rec, const ExperimentConfig& cfg);

// Writes config.txt, records.csv, aggregate_<learner>.csv and
// curves/<learner>_rep<NNN>.csv under out_root/<config hash>/ and returns
// that run directory.
std::filesystem::path write_experiment_outputs(
    const ExperimentResult& res, const std::filesystem::path& out_root);

void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<double>& curve);
void write_aggregate_csv(const std::filesystem::path& path,
                         const AggregateCurve& agg);
void write_records_csv(const std::filesystem::path& path,
                       const std::vector<RunRecord>& records);
void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<SweepRow>& rows);

AggregateCurve read_aggregate_csv(const std::filesystem::path& path);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

// fn(i) for i in [0,n) on up to `threads` workers; each job writes only its
// own result slot, so the outcome does not depend on the thread count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace actis
