#include "imrl/harness/trainer.hpp"

#include "imrl/core/error.hpp"
#include "imrl/harness/checkpoint.hpp"
#include "imrl/imagination/imagination.hpp"

#include <cmath>
#include <filesystem>

namespace imrl::harness {

namespace {

constexpr int kTrainColumns = 7;
constexpr int kEvalColumns = 3;

Eigen::MatrixXd train_matrix(const std::vector<TrainRow>& rows) {
  Eigen::MatrixXd m(kTrainColumns, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TrainRow& r = rows[i];
    m.col(static_cast<Eigen::Index>(i)) << static_cast<double>(r.step), static_cast<double>(r.episode),
        r.episode_return, r.critic_loss, r.actor_loss, r.im_loss, r.wall_ms;
  }
  return m;
}

Eigen::MatrixXd eval_matrix(const std::vector<EvalRow>& rows) {
  Eigen::MatrixXd m(kEvalColumns, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) << static_cast<double>(rows[i].step), rows[i].mean_return,
        rows[i].std_return;
  }
  return m;
}

}  // namespace

EvalResult evaluate(agents::Agent& agent, envs::Environment& env, int episodes, std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("evaluate: episodes must be >= 1");
  Rng seeds(seed);
  Rng unused(0);
  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    Eigen::VectorXd obs = env.reset(seeds.next_u64());
    double total = 0.0;
    while (true) {
      const envs::StepResult r = env.step(agent.act(obs, agents::ActMode::kEval, unused));
      total += r.reward;
      obs = r.observation;
      if (r.done || r.truncated) break;
    }
    returns.push_back(total);
  }
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= static_cast<double>(returns.size());
  double var = 0.0;
  if (returns.size() > 1) {
    for (double r : returns) var += (r - mean) * (r - mean);
    var /= static_cast<double>(returns.size() - 1);
  }
  return EvalResult{mean, std::sqrt(var)};
}

Trainer::Trainer(ExperimentConfig config, RunOptions options)
    : config_(std::move(config)), options_(std::move(options)) {
  config_.validate();
  const std::uint64_t seed = config_.seed;
  env_ = envs::make_environment(config_.env.name);
  eval_env_ = envs::make_environment(config_.env.name);
  const agents::EnvSpec spec = agents::EnvSpec::of(*env_);
  buffer_ = std::make_unique<replay::ReplayBuffer>(config_.buffer.capacity, spec.obs_dim,
                                                   spec.action_space.storage_dim());
  agent_ = agents::make_agent(config_.algo, spec, Rng::derive_seed(seed, "agent"));
  if (config_.im.enabled) {
    agent_ = imagination::attach(std::move(agent_), *buffer_, config_.im, spec.action_space, spec.obs_dim,
                                 config_.algo.lr_critic, config_.algo.batch_size,
                                 Rng::derive_seed(seed, "imagination"));
  }
  env_rng_ = Rng::derive(seed, "env");
  action_rng_ = Rng::derive(seed, "action");
  replay_rng_ = Rng::derive(seed, "replay");
  eval_rng_ = Rng::derive(seed, "eval");
  obs_ = env_->reset(env_rng_.next_u64());
  started_ = std::chrono::steady_clock::now();
}

void Trainer::evaluate_now() {
  const EvalResult r = evaluate(*agent_, *eval_env_, config_.train.eval_episodes, eval_rng_.next_u64());
  metrics_.eval.push_back(EvalRow{step_, r.mean_return, r.std_return});
  if (options_.progress) {
    options_.progress("step " + std::to_string(step_) + " eval_return " + format_real(r.mean_return) + " +- " +
                      format_real(r.std_return));
  }
}

void Trainer::end_episode_if(bool finished) {
  if (!finished) return;
  last_return_ = episode_return_;
  episode_return_ = 0.0;
  ++episodes_;
  obs_ = env_->reset(env_rng_.next_u64());
}

void Trainer::run_until(std::int64_t target) {
  if (metrics_.failed) return;
  if (!initial_eval_done_) {
    evaluate_now();
    initial_eval_done_ = true;
  }
  const envs::ActionSpace& space = env_->action_space();
  try {
    while (step_ < target) {
      agent_->set_env_step(step_);
      const envs::Action action = step_ < config_.train.warmup_steps
                                      ? space.sample(action_rng_)
                                      : agent_->act(obs_, agents::ActMode::kExplore, action_rng_);
      const envs::StepResult r = env_->step(action);
      buffer_->push(replay::Transition{obs_, action, r.reward, r.observation, r.done, r.truncated, episodes_});
      episode_return_ += r.reward;
      obs_ = r.observation;
      ++step_;
      end_episode_if(r.done || r.truncated);

      if (step_ > config_.train.warmup_steps) {
        const replay::Batch batch =
            buffer_->sample_batch(static_cast<std::size_t>(config_.algo.batch_size), replay_rng_);
        const agents::UpdateStats s = agent_->update(batch);
        double wall = 0.0;
        if (options_.record_wall_time) {
          wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started_).count();
        }
        metrics_.train.push_back(
            TrainRow{step_, episodes_, last_return_, s.critic_loss, s.actor_loss, s.im_loss, wall});
      }
      if (step_ % config_.train.eval_every == 0) evaluate_now();
    }
  } catch (const NonFiniteError& e) {
    metrics_.failed = true;
    metrics_.failure = "step " + std::to_string(step_) + ": " + e.what();
    if (options_.progress) options_.progress("run failed at " + metrics_.failure);
  }
}

Archive Trainer::snapshot() const {
  Archive ar;
  nlohmann::json& run = ar.meta()["run"];
  run["config"] = config_to_json(config_);
  run["step"] = step_;
  run["episodes"] = episodes_;
  run["initial_eval_done"] = initial_eval_done_;
  run["failed"] = metrics_.failed;
  run["failure"] = metrics_.failure;
  run["rng"] = {{"env", env_rng_.state()},
                {"action", action_rng_.state()},
                {"replay", replay_rng_.state()},
                {"eval", eval_rng_.state()}};
  ar.put_scalar("run.episode_return", episode_return_);
  ar.put_scalar("run.last_return", last_return_);
  ar.put("run.obs", Eigen::MatrixXd(obs_));
  ar.put("run.env_state", env_->state_vector());
  ar.put("metrics.train", train_matrix(metrics_.train));
  ar.put("metrics.eval", eval_matrix(metrics_.eval));
  buffer_->save(ar, "buffer");
  agent_->save(ar, "agent");
  return ar;
}

void Trainer::restore(const Archive& ar) {
  const nlohmann::json& run = ar.meta().at("run");
  step_ = run.at("step").get<std::int64_t>();
  episodes_ = run.at("episodes").get<std::int64_t>();
  initial_eval_done_ = run.at("initial_eval_done").get<bool>();
  metrics_.failed = run.at("failed").get<bool>();
  metrics_.failure = run.at("failure").get<std::string>();
  const nlohmann::json& rng = run.at("rng");
  env_rng_.set_state(rng.at("env").get<std::string>());
  action_rng_.set_state(rng.at("action").get<std::string>());
  replay_rng_.set_state(rng.at("replay").get<std::string>());
  eval_rng_.set_state(rng.at("eval").get<std::string>());
  episode_return_ = ar.scalar("run.episode_return");
  last_return_ = ar.scalar("run.last_return");
  ar.read("run.obs", obs_);
  env_->set_state_vector(ar.vector("run.env_state"));

  const Eigen::MatrixXd train = ar.matrix("metrics.train");
  const Eigen::MatrixXd eval = ar.matrix("metrics.eval");
  if ((train.size() != 0 && train.rows() != kTrainColumns) || (eval.size() != 0 && eval.rows() != kEvalColumns)) {
    throw CheckpointError("checkpoint: malformed metrics arrays");
  }
  metrics_.train.clear();
  for (Eigen::Index i = 0; i < train.cols(); ++i) {
    metrics_.train.push_back(TrainRow{static_cast<std::int64_t>(train(0, i)), static_cast<std::int64_t>(train(1, i)),
                                      train(2, i), train(3, i), train(4, i), train(5, i), train(6, i)});
  }
  metrics_.eval.clear();
  for (Eigen::Index i = 0; i < eval.cols(); ++i) {
    metrics_.eval.push_back(EvalRow{static_cast<std::int64_t>(eval(0, i)), eval(1, i), eval(2, i)});
  }
  buffer_->load(ar, "buffer");
  agent_->load(ar, "agent");
}

void Trainer::save_checkpoint(const std::filesystem::path& path) const { write_checkpoint(path, snapshot()); }

Trainer Trainer::from_archive(const Archive& archive, RunOptions options) {
  if (!archive.meta().contains("run")) throw CheckpointError("checkpoint: no run state");
  Trainer t(config_from_json(archive.meta().at("run").at("config")), std::move(options));
  t.restore(archive);
  return t;
}

Trainer Trainer::from_checkpoint(const std::filesystem::path& path, RunOptions options) {
  return from_archive(read_checkpoint(path), std::move(options));
}

void Trainer::write_outputs(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_text(dir / "train.csv", train_csv(metrics_.train));
  write_text(dir / "eval.csv", eval_csv(metrics_.eval));
  save_checkpoint(dir / "final.ckpt");
  write_text(dir / "config.echo.json", config_to_json(config_).dump(2) + "\n");
}

RunMetrics run_training(const ExperimentConfig& config, const std::optional<std::filesystem::path>& out,
                        RunOptions options) {
  Trainer t(config, std::move(options));
  t.run();
  if (out) t.write_outputs(*out);
  return t.metrics();
}

}  // namespace imrl::harness
