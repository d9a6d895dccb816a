#include "actis/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace actis {

namespace fs = std::filesystem;

namespace {

// mix_seed tags for the independent random sub-streams of one repetition
constexpr std::uint64_t kTagStream = 1;
constexpr std::uint64_t kTagInit = 2;
constexpr std::uint64_t kTagWeights = 3;
constexpr std::uint64_t kTagStrategy = 4;
constexpr std::uint64_t kTagPairs = 5;

std::string priors_name(PriorProfile p) {
  return p == PriorProfile::Balanced ? "balanced" : "multi_minority";
}

PriorProfile priors_from_name(const std::string& s) {
  if (s == "balanced") return PriorProfile::Balanced;
  if (s == "multi_minority") return PriorProfile::MultiMinority;
  throw std::runtime_error("config key 'priors': unknown profile '" + s + "'");
}

std::string strategy_name(StrategyKind s) {
  return s == StrategyKind::Fixed ? "fixed" : "variable";
}

StrategyKind strategy_from_name(const std::string& s) {
  if (s == "fixed") return StrategyKind::Fixed;
  if (s == "variable") return StrategyKind::Variable;
  throw std::runtime_error("config key 'strategy': unknown value '" + s + "'");
}

std::string mechanism_name(BudgetMechanism m) {
  switch (m) {
    case BudgetMechanism::Exact:
      return "exact";
    case BudgetMechanism::WindowExact:
      return "window_exact";
    case BudgetMechanism::WindowApprox:
      return "window_approx";
  }
  throw std::logic_error("mechanism_name: bad value");
}

BudgetMechanism mechanism_from_name(const std::string& s) {
  if (s == "exact") return BudgetMechanism::Exact;
  if (s == "window_exact") return BudgetMechanism::WindowExact;
  if (s == "window_approx") return BudgetMechanism::WindowApprox;
  throw std::runtime_error("config key 'budget_mechanism': unknown value '" +
                           s + "'");
}

std::string learners_to_string(const std::vector<LearnerKind>& ls) {
  std::string out;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (i) out += ',';
    out += learner_name(ls[i]);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ExperimentConfig

ExperimentConfig ExperimentConfig::from_kv(const KvMap& kv) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "dataset") {
      cfg.dataset = value;
    } else if (key == "priors") {
      cfg.priors = priors_from_name(value);
    } else if (key == "majority_class") {
      cfg.majority_class = static_cast<int>(parse_int(value, key));
    } else if (key == "p_major") {
      cfg.p_major = parse_double(value, key);
    } else if (key == "drift_step") {
      cfg.drift_step = parse_int(value, key);
    } else if (key == "horizon") {
      cfg.horizon = parse_int(value, key);
    } else if (key == "learners") {
      cfg.learners.clear();
      for (const auto& name : split_list(value))
        cfg.learners.push_back(learner_from_name(name));
    } else if (key == "B") {
      cfg.budget = parse_double(value, key);
    } else if (key == "E") {
      cfg.queue_capacity = static_cast<int>(parse_int(value, key));
    } else if (key == "repetitions") {
      cfg.repetitions = static_cast<int>(parse_int(value, key));
    } else if (key == "seed") {
      const std::int64_t s = parse_int(value, key);
      if (s < 0) throw std::runtime_error("config key 'seed': must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "strategy") {
      cfg.strategy = strategy_from_name(value);
    } else if (key == "theta0") {
      cfg.theta0 = parse_double(value, key);
    } else if (key == "theta_fixed") {
      cfg.theta_fixed = parse_double(value, key);
    } else if (key == "s") {
      cfg.step_size = parse_double(value, key);
    } else if (key == "delta") {
      cfg.delta = parse_double(value, key);
    } else if (key == "budget_mechanism") {
      cfg.mechanism = mechanism_from_name(value);
    } else if (key == "w") {
      cfg.window = static_cast<int>(parse_int(value, key));
    } else if (key == "fading") {
      cfg.fading = parse_double(value, key);
    } else if (key == "lr") {
      cfg.lr = parse_double(value, key);
    } else if (key == "leaky_slope") {
      cfg.leaky_slope = parse_double(value, key);
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_int(value, key));
    } else {
      throw std::runtime_error("unknown config key: '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

KvMap ExperimentConfig::to_kv() const {
  KvMap kv;
  kv["dataset"] = dataset;
  kv["priors"] = priors_name(priors);
  kv["majority_class"] = std::to_string(majority_class);
  kv["p_major"] = format_double(p_major);
  kv["drift_step"] = std::to_string(drift_step);
  kv["horizon"] = std::to_string(horizon);
  kv["learners"] = learners_to_string(learners);
  kv["B"] = format_double(budget);
  kv["E"] = std::to_string(queue_capacity);
  kv["repetitions"] = std::to_string(repetitions);
  kv["seed"] = std::to_string(seed);
  kv["strategy"] = strategy_name(strategy);
  kv["theta0"] = format_double(theta0);
  kv["theta_fixed"] = format_double(theta_fixed);
  kv["s"] = format_double(step_size);
  kv["delta"] = format_double(delta);
  kv["budget_mechanism"] = mechanism_name(mechanism);
  kv["w"] = std::to_string(window);
  kv["fading"] = format_double(fading);
  kv["lr"] = format_double(lr);
  kv["leaky_slope"] = format_double(leaky_slope);
  kv["threads"] = std::to_string(threads);
  return kv;
}

void ExperimentConfig::validate() const {
  if (dataset != "sea4" && dataset != "circles10")
    throw std::invalid_argument("config: unknown dataset '" + dataset + "'");
  const int num_classes = dataset == "sea4" ? 4 : 10;
  if (horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
  if (repetitions < 1)
    throw std::invalid_argument("config: repetitions must be >= 1");
  if (budget < 0.0 || budget > 1.0)
    throw std::invalid_argument("config: B must be in [0,1]");
  if (queue_capacity < 2)
    throw std::invalid_argument("config: E must be >= 2");
  if (learners.empty())
    throw std::invalid_argument("config: learners list is empty");
  if (majority_class < 0 || majority_class >= num_classes)
    throw std::invalid_argument("config: majority_class out of range");
  if (p_major != -1.0 && !(p_major > 0.0 && p_major < 1.0))
    throw std::invalid_argument("config: p_major must be in (0,1) or -1");
  if (drift_step < -1)
    throw std::invalid_argument("config: drift_step must be >= 0 or -1");
  if (!(theta0 > 0.0) || theta0 > 1.0)
    throw std::invalid_argument("config: theta0 must be in (0,1]");
  if (!(theta_fixed > 0.0) || theta_fixed > 1.0)
    throw std::invalid_argument("config: theta_fixed must be in (0,1]");
  if (!(step_size > 0.0))
    throw std::invalid_argument("config: s must be > 0");
  if (delta < 0.0) throw std::invalid_argument("config: delta must be >= 0");
  if (window < 1) throw std::invalid_argument("config: w must be >= 1");
  if (!(fading > 0.0) || fading > 1.0)
    throw std::invalid_argument("config: fading must be in (0,1]");
  if (!(lr > 0.0)) throw std::invalid_argument("config: lr must be > 0");
  if (!(leaky_slope >= 0.0))
    throw std::invalid_argument("config: leaky_slope must be >= 0");
  if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
}

std::string ExperimentConfig::canonical() const {
  KvMap kv = to_kv();
  kv.erase("threads");
  std::string out;
  for (const auto& [key, value] : kv) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  return out;
}

std::string ExperimentConfig::hash() const { return hex16(fnv1a64(canonical())); }

LearnerHyper ExperimentConfig::hyper() const {
  LearnerHyper h;
  h.lr = lr;
  h.leaky_slope = leaky_slope;
  h.strategy = strategy;
  h.theta0 = theta0;
  h.theta_fixed = theta_fixed;
  h.step_size = step_size;
  h.delta = delta;
  h.mechanism = mechanism;
  h.budget = budget;
  h.window = window;
  h.queue_capacity = queue_capacity;
  return h;
}

double ExperimentConfig::resolved_p_major() const {
  if (p_major > 0.0) return p_major;
  return dataset == "sea4" ? 0.97 : 0.955;
}

// ---------------------------------------------------------------------------
// Running

std::unique_ptr<StreamGenerator> make_generator(const ExperimentConfig& cfg) {
  std::optional<std::int64_t> drift;
  if (cfg.drift_step >= 0) drift = cfg.drift_step;
  if (cfg.dataset == "sea4") {
    const ImbalanceProfile profile =
        cfg.priors == PriorProfile::Balanced
            ? ImbalanceProfile::balanced(4)
            : ImbalanceProfile::multi_minority(4, cfg.majority_class,
                                               cfg.resolved_p_major());
    Sea4Config sc;
    sc.drift_step = drift;
    return std::make_unique<Sea4Generator>(sc, profile);
  }
  if (cfg.dataset == "circles10") {
    const ImbalanceProfile profile =
        cfg.priors == PriorProfile::Balanced
            ? ImbalanceProfile::balanced(10)
            : ImbalanceProfile::multi_minority(10, cfg.majority_class,
                                               cfg.resolved_p_major());
    Circles10Config cc = Circles10Config::defaults();
    cc.drift_step = drift;
    return std::make_unique<Circles10Generator>(cc, profile);
  }
  throw std::invalid_argument("unknown dataset: " + cfg.dataset);
}

namespace {

struct RepOutput {
  std::vector<std::vector<double>> curves;  // [learner][step]
  std::vector<std::int64_t> queries;        // [learner]
};

RepOutput run_repetition(const ExperimentConfig& cfg, int rep) {
  const std::uint64_t root = cfg.seed + static_cast<std::uint64_t>(rep);
  const auto gen = make_generator(cfg);
  const int num_classes = gen->num_classes();

  Rng stream_rng(mix_seed(root, kTagStream));
  std::vector<Instance> stream;
  stream.reserve(static_cast<std::size_t>(cfg.horizon));
  for (std::int64_t t = 0; t < cfg.horizon; ++t)
    stream.push_back(gen->sample(stream_rng, t));

  Rng init_rng(mix_seed(root, kTagInit));
  const std::vector<Instance> initial =
      make_initial_labelled(init_rng, *gen, cfg.queue_capacity);

  const LearnerHyper hyper = cfg.hyper();
  RepOutput out;
  for (const LearnerKind kind : cfg.learners) {
    const auto k = static_cast<std::uint64_t>(kind);
    auto learner = make_learner(kind, gen->dims(), num_classes, hyper,
                                mix_seed(root, kTagWeights, k),
                                mix_seed(root, kTagStrategy, k),
                                mix_seed(root, kTagPairs, k));
    learner->init_store(initial);

    PrequentialGmean metric(num_classes, cfg.fading);
    CountingOracle oracle;
    std::vector<double> curve;
    curve.reserve(stream.size());
    for (const Instance& truth : stream) {
      Instance unlabelled = truth;
      unlabelled.y.reset();
      oracle.set_truth(truth.y);
      const StepOutcome so = learner->step(unlabelled, oracle);
      metric.update(*truth.y, so.prediction);
      curve.push_back(metric.gmean());
    }
    out.curves.push_back(std::move(curve));
    out.queries.push_back(oracle.reveals());
  }
  return out;
}

std::string curve_ref_name(LearnerKind kind, int rep) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_rep%03d.csv", rep);
  return "curves/" + learner_name(kind) + buf;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.cfg = cfg;
  res.config_hash = cfg.hash();

  const int num_learners = static_cast<int>(cfg.learners.size());
  std::vector<RepOutput> reps(static_cast<std::size_t>(cfg.repetitions));
  parallel_for(cfg.repetitions, cfg.threads,
               [&](int rep) { reps[rep] = run_repetition(cfg, rep); });

  for (int l = 0; l < num_learners; ++l) {
    LearnerResult lr;
    lr.kind = cfg.learners[l];
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      lr.curves.push_back(std::move(reps[rep].curves[l]));
      RunRecord rec;
      rec.config_hash = res.config_hash;
      rec.seed = cfg.seed + static_cast<std::uint64_t>(rep);
      rec.learner = learner_name(lr.kind);
      rec.final_gmean = lr.curves.back().back();
      rec.curve_ref = curve_ref_name(lr.kind, rep);
      rec.queries = reps[rep].queries[l];
      lr.records.push_back(std::move(rec));
    }
    lr.aggregate = aggregate(lr.curves);
    res.learners.push_back(std::move(lr));
  }
  return res;
}

std::vector<SweepRow> sweep_budget(
    const ExperimentConfig& cfg, const std::vector<double>& budgets,
    const std::function<void(const ExperimentResult&)>& on_result) {
  if (budgets.empty())
    throw std::invalid_argument("sweep: empty budget grid");
  bool has_reference = false;
  for (const double b : budgets) {
    if (b < 0.0 || b > 1.0)
      throw std::invalid_argument("sweep: budgets must be in [0,1]");
    if (b == 1.0) has_reference = true;
  }
  if (!has_reference)
    throw std::invalid_argument(
        "sweep: budget grid must include 1.0, the supervised reference");

  std::vector<SweepRow> rows;
  for (const double b : budgets) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.budget = b;
    const ExperimentResult res = run_experiment(run_cfg);
    if (on_result) on_result(res);
    for (const auto& lr : res.learners)
      rows.push_back({b, learner_name(lr.kind), lr.aggregate.mean.back(),
                      lr.aggregate.se.back(), lr.aggregate.n});
  }
  return rows;
}

double max_allowed_queries(const ExperimentConfig& cfg) {
  return cfg.budget * static_cast<double>(cfg.horizon) +
         static_cast<double>(cfg.window);
}

bool respects_budget(const RunRecord& rec, const ExperimentConfig& cfg) {
  return static_cast<double>(rec.queries) <= max_allowed_queries(cfg) + 1e-9;
}

// ---------------------------------------------------------------------------
// Output files

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_curve_csv(const fs::path& path, const std::vector<double>& curve) {
  auto out = open_out(path);
  out << "t,gmean\n";
  for (std::size_t t = 0; t < curve.size(); ++t)
    out << t << ',' << format_double(curve[t]) << '\n';
}

void write_aggregate_csv(const fs::path& path, const AggregateCurve& agg) {
  auto out = open_out(path);
  out << "t,mean,stderr,n\n";
  for (std::size_t t = 0; t < agg.mean.size(); ++t)
    out << t << ',' << format_double(agg.mean[t]) << ','
        << format_double(agg.se[t]) << ',' << agg.n << '\n';
}

void write_records_csv(const fs::path& path,
                       const std::vector<RunRecord>& records) {
  auto out = open_out(path);
  out << "config_hash,seed,learner,final_gmean,curve_ref,queries\n";
  for (const auto& r : records)
    out << r.config_hash << ',' << r.seed << ',' << r.learner << ','
        << format_double(r.final_gmean) << ',' << r.curve_ref << ','
        << r.queries << '\n';
}

void write_sweep_csv(const fs::path& path, const std::vector<SweepRow>& rows) {
  auto out = open_out(path);
  out << "budget,learner,mean,stderr,n\n";
  for (const auto& r : rows)
    out << format_double(r.budget) << ',' << r.learner << ','
        << format_double(r.mean_final) << ',' << format_double(r.se_final)
        << ',' << r.n << '\n';
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

}  // namespace

AggregateCurve read_aggregate_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);  // header
  AggregateCurve agg;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != 4)
      throw std::runtime_error("malformed aggregate row in " + path.string());
    agg.mean.push_back(parse_double(fields[1], "mean"));
    agg.se.push_back(parse_double(fields[2], "stderr"));
    agg.n = static_cast<int>(parse_int(fields[3], "n"));
  }
  return agg;
}

std::vector<SweepRow> read_sweep_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != 5)
      throw std::runtime_error("malformed sweep row in " + path.string());
    SweepRow r;
    r.budget = parse_double(fields[0], "budget");
    r.learner = fields[1];
    r.mean_final = parse_double(fields[2], "mean");
    r.se_final = parse_double(fields[3], "stderr");
    r.n = static_cast<int>(parse_int(fields[4], "n"));
    rows.push_back(std::move(r));
  }
  return rows;
}

fs::path write_experiment_outputs(const ExperimentResult& res,
                                  const fs::path& out_root) {
  const fs::path dir = out_root / res.config_hash;
  fs::create_directories(dir / "curves");

  open_out(dir / "config.txt") << res.cfg.canonical();

  std::vector<RunRecord> all_records;
  for (const auto& lr : res.learners) {
    write_aggregate_csv(dir / ("aggregate_" + learner_name(lr.kind) + ".csv"),
                        lr.aggregate);
    for (std::size_t rep = 0; rep < lr.curves.size(); ++rep)
      write_curve_csv(dir / lr.records[rep].curve_ref, lr.curves[rep]);
    all_records.insert(all_records.end(), lr.records.begin(),
                       lr.records.end());
  }
  write_records_csv(dir / "records.csv", all_records);
  return dir;
}

// ---------------------------------------------------------------------------

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  threads = std::min(std::max(threads, 1), n);
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace actis
