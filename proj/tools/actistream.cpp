#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "actis/config.hpp"
#include "actis/experiment.hpp"
#include "actis/plot.hpp"
#include "actis/rng.hpp"
#include "actis/stream.hpp"

namespace fs = std::filesystem;
using namespace actis;

namespace {

// Every config key is also a command-line flag, so any file setting can be
// overridden with --key=value.
const std::vector<std::pair<std::string, std::string>> kConfigKeys = {
    {"dataset", "sea4 | circles10"},
    {"priors", "balanced | multi_minority"},
    {"majority_class", "majority class index under multi_minority"},
    {"p_major", "majority prior, -1 = dataset default"},
    {"drift_step", "abrupt drift step, -1 = stationary"},
    {"horizon", "stream length T"},
    {"learners", "comma list: incremental,actiq,actisiamese"},
    {"B", "labelling budget in [0,1]"},
    {"E", "per-class queue capacity"},
    {"repetitions", "independent repetitions"},
    {"seed", "base seed; repetition r uses seed+r"},
    {"strategy", "fixed | variable"},
    {"theta0", "initial variable-uncertainty threshold"},
    {"theta_fixed", "fixed-uncertainty threshold"},
    {"s", "threshold adjustment step"},
    {"delta", "randomisation spread of the variable strategy"},
    {"budget_mechanism", "exact | window_exact | window_approx"},
    {"w", "budget window length"},
    {"fading", "prequential fading factor"},
    {"lr", "learning rate"},
    {"leaky_slope", "LeakyReLU negative slope"},
    {"threads", "worker threads across repetitions"},
};

struct ConfigArgs {
  std::string file;
  KvMap overrides;

  void attach(CLI::App* sub) {
    sub->add_option("--config", file, "key=value config file");
    for (const auto& [key, desc] : kConfigKeys) {
      const std::string name = key;
      sub->add_option_function<std::string>(
          "--" + name,
          [this, name](const std::string& v) { overrides[name] = v; }, desc);
    }
  }

  ExperimentConfig build() const {
    KvMap kv;
    if (!file.empty()) kv = load_kv_file(file);
    for (const auto& [k, v] : overrides) kv[k] = v;
    return ExperimentConfig::from_kv(kv);
  }
};

void cmd_generate(const ConfigArgs& args, long long n, const std::string& out) {
  const ExperimentConfig cfg = args.build();
  const auto gen = make_generator(cfg);
  if (n < 0) n = cfg.horizon;

  std::FILE* f = stdout;
  if (out != "-") {
    f = std::fopen(out.c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + out);
  }
  // Same sub-seed as repetition 0 of `run`, so the dump matches what the
  // learners would see.
  Rng rng(mix_seed(cfg.seed, 1));
  std::fputs("t,x1,x2,y\n", f);
  for (long long t = 0; t < n; ++t) {
    const Instance inst = gen->sample(rng, t);
    std::fprintf(f, "%lld,%s,%s,%d\n", t, format_double(inst.x[0]).c_str(),
                 format_double(inst.x[1]).c_str(), *inst.y);
  }
  if (f != stdout) std::fclose(f);
}

void render_result_curves(const ExperimentResult& res, const fs::path& dir) {
  std::vector<std::pair<std::string, AggregateCurve>> aggs;
  for (const auto& lr : res.learners)
    aggs.emplace_back(learner_name(lr.kind), lr.aggregate);
  std::optional<std::int64_t> drift;
  if (res.cfg.drift_step >= 0) drift = res.cfg.drift_step;
  render_curves(aggs, drift, dir / "curves.svg");
}

void cmd_run(const ConfigArgs& args, const std::string& out_root) {
  const ExperimentConfig cfg = args.build();
  std::cerr << "run " << cfg.hash() << ": " << cfg.dataset << ", B=" << cfg.budget
            << ", T=" << cfg.horizon << ", " << cfg.repetitions
            << " repetitions\n";
  const ExperimentResult res = run_experiment(cfg);
  const fs::path dir = write_experiment_outputs(res, out_root);
  render_result_curves(res, dir);
  std::cout << "wrote " << dir.string() << "\n";
  for (const auto& lr : res.learners)
    std::cout << "  " << learner_name(lr.kind)
              << " final G-mean: " << format_double(lr.aggregate.mean.back())
              << " +- " << format_double(lr.aggregate.se.back()) << "\n";
}

void cmd_sweep(const ConfigArgs& args, const std::string& budgets_arg,
               const std::string& out_root) {
  const ExperimentConfig cfg = args.build();
  std::vector<double> budgets;
  for (const auto& item : split_list(budgets_arg))
    budgets.push_back(parse_double(item, "budgets"));

  const fs::path sweep_dir = fs::path(out_root) / ("sweep_" + cfg.hash());
  fs::create_directories(sweep_dir);
  const auto rows = sweep_budget(cfg, budgets, [&](const ExperimentResult& r) {
    std::cerr << "  B=" << r.cfg.budget << " done\n";
    write_experiment_outputs(r, out_root);
  });
  write_sweep_csv(sweep_dir / "sweep.csv", rows);
  render_sweep(rows, sweep_dir / "sweep.svg");
  std::cout << "wrote " << (sweep_dir / "sweep.csv").string() << "\n";
  for (const auto& r : rows)
    std::cout << "  B=" << format_double(r.budget) << " " << r.learner << ": "
              << format_double(r.mean_final) << " +- "
              << format_double(r.se_final) << "\n";
}

void cmd_plot(const std::string& dir_arg, const std::string& sweep_csv,
              const std::string& out_arg) {
  if (!sweep_csv.empty()) {
    const fs::path out =
        out_arg.empty() ? fs::path(sweep_csv).replace_extension(".svg")
                        : fs::path(out_arg);
    render_sweep(read_sweep_csv(sweep_csv), out);
    std::cout << "wrote " << out.string() << "\n";
    return;
  }
  if (dir_arg.empty())
    throw std::runtime_error("plot: need --dir RUNDIR or --sweep-csv FILE");
  const fs::path dir(dir_arg);
  const ExperimentConfig cfg =
      ExperimentConfig::from_kv(load_kv_file((dir / "config.txt").string()));
  std::vector<std::pair<std::string, AggregateCurve>> aggs;
  for (const LearnerKind kind : cfg.learners) {
    const std::string name = learner_name(kind);
    aggs.emplace_back(name,
                      read_aggregate_csv(dir / ("aggregate_" + name + ".csv")));
  }
  std::optional<std::int64_t> drift;
  if (cfg.drift_step >= 0) drift = cfg.drift_step;
  const fs::path out = out_arg.empty() ? dir / "curves.svg" : fs::path(out_arg);
  render_curves(aggs, drift, out);
  std::cout << "wrote " << out.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming classification experiments"};
  app.require_subcommand(1);

  ConfigArgs gen_args, run_args, sweep_args;

  auto* gen = app.add_subcommand("generate", "dump stream instances as CSV");
  long long gen_n = -1;
  std::string gen_out = "-";
  gen->add_option("--n", gen_n, "instances to dump (default: horizon)");
  gen->add_option("--out", gen_out, "output file, - for stdout");
  gen_args.attach(gen);

  auto* run = app.add_subcommand("run", "run one experiment");
  std::string run_out = "out";
  run->add_option("--out", run_out, "output root directory");
  run_args.attach(run);

  auto* sweep = app.add_subcommand("sweep", "run a budget sweep");
  std::string sweep_out = "out";
  std::string budgets = "0.01,0.05,0.1,0.2,0.5,1.0";
  sweep->add_option("--budgets", budgets, "comma list, must include 1.0");
  sweep->add_option("--out", sweep_out, "output root directory");
  sweep_args.attach(sweep);

  auto* plot = app.add_subcommand("plot", "render SVG plots from CSV outputs");
  std::string plot_dir, plot_sweep_csv, plot_out;
  plot->add_option("--dir", plot_dir, "run directory with aggregate CSVs");
  plot->add_option("--sweep-csv", plot_sweep_csv, "sweep table to plot");
  plot->add_option("--out", plot_out, "output SVG path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) cmd_generate(gen_args, gen_n, gen_out);
    if (run->parsed()) cmd_run(run_args, run_out);
    if (sweep->parsed()) cmd_sweep(sweep_args, budgets, sweep_out);
    if (plot->parsed()) cmd_plot(plot_dir, plot_sweep_csv, plot_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
