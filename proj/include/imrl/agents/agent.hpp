#pragma once

#include "imrl/agents/critic.hpp"
#include "imrl/core/archive.hpp"
#include "imrl/core/rng.hpp"
#include "imrl/envs/environment.hpp"
#include "imrl/nn/mlp.hpp"
#include "imrl/replay/replay_buffer.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace imrl::agents {

struct AgentConfig {
  std::string name = "dqn";  // dqn | ddpg | sac
  double gamma = 0.99;
  double lr_actor = 3e-4;
  double lr_critic = 3e-4;
  int batch_size = 128;
  int target_update_period = 500;  // DQN hard copy, in gradient steps
  double polyak = 0.005;           // DDPG/SAC target tracking rate
  double alpha = 0.2;              // SAC entropy coefficient (fixed)
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_decay_steps = 10000;
  double exploration_noise = 0.1;  // DDPG: sigma as a fraction of the action range
  std::vector<int> hidden;         // empty: per-environment default
  nn::Activation activation = nn::Activation::kTanh;

  void validate() const;
};

/// 2x256 for pendulum, 2x64 otherwise.
std::vector<int> default_hidden(std::string_view env_name);

struct EnvSpec {
  std::string env_name;
  int obs_dim = 0;
  envs::ActionSpace action_space;

  static EnvSpec of(const envs::Environment& env);
};

enum class ActMode { kExplore, kEval };

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double im_loss = 0.0;
  double alpha = 0.0;
};

class Agent {
 public:
  virtual ~Agent() = default;

  /// Eval mode is a deterministic function of (parameters, observation) and
  /// draws nothing from `rng`.
  virtual envs::Action act(const Eigen::VectorXd& obs, ActMode mode, Rng& rng) = 0;
  /// One gradient step. Throws NonFiniteError on a NaN/Inf loss.
  virtual UpdateStats update(const replay::Batch& batch) = 0;
  virtual std::vector<Critic*> critics() = 0;
  /// Environment steps taken so far (drives exploration schedules).
  virtual void set_env_step(std::int64_t) {}

  virtual void save(Archive& ar, const std::string& prefix) const = 0;
  virtual void load(const Archive& ar, const std::string& prefix) = 0;
};

/// Builds the agent named by config.name. Network initialization and any
/// update-time sampling are seeded from `seed`.
std::unique_ptr<Agent> make_agent(const AgentConfig& config, const EnvSpec& spec, std::uint64_t seed);

/// Squashes raw outputs through tanh into the box: center + half_range * tanh(x).
Eigen::MatrixXd squash_to_box(const Eigen::MatrixXd& raw, const envs::ActionSpace& space);

}  // namespace imrl::agents
