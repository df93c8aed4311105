#pragma once

#include "imrl/agents/agent.hpp"
#include "imrl/core/archive.hpp"
#include "imrl/core/rng.hpp"
#include "imrl/envs/environment.hpp"
#include "imrl/harness/config.hpp"
#include "imrl/harness/metrics.hpp"
#include "imrl/replay/replay_buffer.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace imrl::harness {

struct RunOptions {
  /// Fill wall_ms with elapsed time. Off by default: timings are the only
  /// non-reproducible column.
  bool record_wall_time = false;
  /// Receives one progress line per evaluation when set.
  std::function<void(const std::string&)> progress;
};

struct EvalResult {
  double mean_return = 0.0;
  double std_return = 0.0;  // sample standard deviation
};

/// Eval-mode rollouts from seeds derived from `seed`; undiscounted returns.
EvalResult evaluate(agents::Agent& agent, envs::Environment& env, int episodes, std::uint64_t seed);

/// One seeded training run: one environment step, then (after warmup) one
/// gradient step, with evaluations every train.eval_every steps and at step 0.
/// Independent RNG streams per concern:
///   env (episode reset seeds), action (exploration), replay (minibatches),
///   eval (evaluation seeds); the agent and the imagination module derive
///   their own streams from the master seed.
class Trainer {
 public:
  /// Validates the config before building anything.
  explicit Trainer(ExperimentConfig config, RunOptions options = {});

  /// Advances to environment step `step` (no-op if already there) or until
  /// the run fails.
  void run_until(std::int64_t step);
  void run() { run_until(config_.train.total_steps); }

  std::int64_t step() const { return step_; }
  const RunMetrics& metrics() const { return metrics_; }
  const ExperimentConfig& config() const { return config_; }
  agents::Agent& agent() { return *agent_; }
  const replay::ReplayBuffer& buffer() const { return *buffer_; }
  envs::Environment& eval_environment() { return *eval_env_; }

  Archive snapshot() const;
  void save_checkpoint(const std::filesystem::path& path) const;
  static Trainer from_checkpoint(const std::filesystem::path& path, RunOptions options = {});
  static Trainer from_archive(const Archive& archive, RunOptions options = {});

  /// train.csv, eval.csv, final.ckpt, config.echo.json.
  void write_outputs(const std::filesystem::path& dir) const;

 private:
  void restore(const Archive& archive);
  void evaluate_now();
  void end_episode_if(bool finished);

  ExperimentConfig config_;
  RunOptions options_;
  std::unique_ptr<envs::Environment> env_;
  std::unique_ptr<envs::Environment> eval_env_;
  std::unique_ptr<replay::ReplayBuffer> buffer_;
  std::unique_ptr<agents::Agent> agent_;
  Rng env_rng_;
  Rng action_rng_;
  Rng replay_rng_;
  Rng eval_rng_;
  Eigen::VectorXd obs_;
  std::int64_t step_ = 0;
  std::int64_t episodes_ = 0;
  double episode_return_ = 0.0;
  double last_return_ = 0.0;
  bool initial_eval_done_ = false;
  RunMetrics metrics_;
  std::chrono::steady_clock::time_point started_;
};

/// Trainer(cfg).run(), then write_outputs(out) when `out` is given. A NaN
/// loss marks the run failed and keeps the partial metrics.
RunMetrics run_training(const ExperimentConfig& config, const std::optional<std::filesystem::path>& out = {},
                        RunOptions options = {});

}  // namespace imrl::harness
