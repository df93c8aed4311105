#include "imrl/core/allocator.hpp"
#include "imrl/harness/compare.hpp"
#include "imrl/harness/config.hpp"
#include "imrl/harness/trainer.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <exception>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

namespace {

using namespace imrl::harness;

std::function<void(const std::string&)> printer(bool quiet) {
  if (quiet) return {};
  return [](const std::string& line) { std::cerr << line << "\n"; };
}

int train(const std::string& config_path, std::uint64_t seed, const std::string& out, bool quiet) {
  ExperimentConfig cfg = load_config(config_path);
  cfg.seed = seed;
  RunOptions opts;
  opts.progress = printer(quiet);
  const RunMetrics m = run_training(cfg, std::filesystem::path(out), opts);
  if (m.failed) {
    std::cerr << "run failed: " << m.failure << "\n";
    return 2;
  }
  if (!m.eval.empty()) std::cout << "final eval_return " << format_real(m.eval.back().mean_return) << "\n";
  return 0;
}

int compare_cmd(const std::string& a, const std::string& b, int seeds, std::int64_t T, const std::string& out,
                bool quiet) {
  const ExperimentConfig base = load_config(a);
  const ExperimentConfig variant = load_config(b);
  std::vector<std::uint64_t> seed_list(static_cast<std::size_t>(seeds));
  std::iota(seed_list.begin(), seed_list.end(), std::uint64_t{0});
  CompareOptions opts;
  opts.run.progress = printer(quiet);
  const ComparisonReport r = compare(base, variant, seed_list, T, std::filesystem::path(out), opts);
  std::cout << "base    " << format_real(r.base.mean) << " +- " << format_real(r.base.std) << " (" << r.base.count
            << " seeds)\n";
  std::cout << "variant " << format_real(r.variant.mean) << " +- " << format_real(r.variant.std) << " ("
            << r.variant.count << " seeds)\n";
  std::cout << "promotion " << format_real(r.promotion) << "%\n";
  std::cout << "steps_to_match " << (r.steps_to_match ? std::to_string(*r.steps_to_match) : "inf") << "\n";
  if (r.warnings > 0) std::cerr << "warning: " << r.warnings << " failed run(s) excluded\n";
  return 0;
}

int eval_cmd(const std::string& checkpoint, int episodes) {
  Trainer t = Trainer::from_checkpoint(checkpoint);
  const EvalResult r = evaluate(t.agent(), t.eval_environment(), episodes,
                                imrl::Rng::derive_seed(t.config().seed, "cli.eval"));
  std::cout << "mean_return " << format_real(r.mean_return) << "\nstd_return " << format_real(r.std_return)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  imrl::tune_allocator();
  CLI::App app{"imrl: off-policy agents with the imagination mechanism"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "Suppress progress lines");
  bool deterministic = true;
  app.add_flag("--deterministic", deterministic, "Accepted for compatibility; runs are always deterministic");

  std::string config, out;
  std::uint64_t seed = 0;
  auto* train_app = app.add_subcommand("train", "Train one seeded run");
  train_app->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  train_app->add_option("--seed", seed, "Master seed");
  train_app->add_option("--out", out, "Output directory")->required();

  std::string config_a, config_b;
  int seeds = 5;
  std::int64_t at_step = 0;
  auto* compare_app = app.add_subcommand("compare", "Baseline vs variant over seeds 0..S-1");
  compare_app->add_option("--config-a", config_a, "Baseline config")->required()->check(CLI::ExistingFile);
  compare_app->add_option("--config-b", config_b, "Variant config")->required()->check(CLI::ExistingFile);
  compare_app->add_option("--seeds", seeds, "Number of seeds")->check(CLI::Range(2, 1000));
  compare_app->add_option("--at-step", at_step, "Budget T")->required()->check(CLI::NonNegativeNumber);
  compare_app->add_option("--out", out, "Output directory")->required();

  std::string checkpoint;
  int episodes = 10;
  auto* eval_app = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_app->add_option("--checkpoint", checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  eval_app->add_option("--episodes", episodes, "Episodes")->check(CLI::PositiveNumber);

  for (CLI::App* sub : {train_app, compare_app, eval_app}) {
    sub->add_flag("--quiet", quiet, "Suppress progress lines");
    sub->add_flag("--deterministic", deterministic, "Always on");
  }

  CLI11_PARSE(app, argc, argv);
  try {
    if (train_app->parsed()) return train(config, seed, out, quiet);
    if (compare_app->parsed()) return compare_cmd(config_a, config_b, seeds, at_step, out, quiet);
    if (eval_app->parsed()) return eval_cmd(checkpoint, episodes);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
