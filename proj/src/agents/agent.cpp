#include "imrl/agents/agent.hpp"

#include "imrl/agents/ddpg.hpp"
#include "imrl/agents/dqn.hpp"
#include "imrl/agents/sac.hpp"
#include "imrl/core/error.hpp"

namespace imrl::agents {

void AgentConfig::validate() const {
  if (name != "dqn" && name != "ddpg" && name != "sac") throw ConfigError("algo.name must be dqn, ddpg or sac");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("algo.gamma must lie in [0, 1)");
  if (!(lr_actor >= 0.0) || !(lr_critic >= 0.0)) throw ConfigError("algo learning rates must be non-negative");
  if (batch_size < 1) throw ConfigError("algo.batch_size must be positive");
  if (target_update_period < 1) throw ConfigError("algo.target_update_period must be positive");
  if (!(polyak >= 0.0 && polyak <= 1.0)) throw ConfigError("algo.polyak must lie in [0, 1]");
  if (!(alpha >= 0.0)) throw ConfigError("algo.alpha must be non-negative");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0)) {
    throw ConfigError("algo.epsilon_start/epsilon_end must lie in [0, 1]");
  }
  if (epsilon_decay_steps < 1) throw ConfigError("algo.epsilon_decay_steps must be positive");
  if (!(exploration_noise >= 0.0)) throw ConfigError("algo.exploration_noise must be non-negative");
  for (int w : hidden) {
    if (w < 1) throw ConfigError("algo.hidden widths must be positive");
  }
}

std::vector<int> default_hidden(std::string_view env_name) {
  if (env_name == "pendulum") return {256, 256};
  return {64, 64};
}

EnvSpec EnvSpec::of(const envs::Environment& env) {
  return EnvSpec{std::string(env.name()), env.observation_dim(), env.action_space()};
}

Eigen::MatrixXd squash_to_box(const Eigen::MatrixXd& raw, const envs::ActionSpace& space) {
  const Eigen::VectorXd center = 0.5 * (space.high + space.low);
  const Eigen::VectorXd half = 0.5 * (space.high - space.low);
  Eigen::MatrixXd out = raw.array().tanh();
  out = (out.array().colwise() * half.array()).colwise() + center.array();
  return out;
}

std::unique_ptr<Agent> make_agent(const AgentConfig& config, const EnvSpec& spec, std::uint64_t seed) {
  config.validate();
  if (config.name == "dqn") {
    if (!spec.action_space.is_discrete()) throw ConfigError("dqn needs a discrete-action environment");
    return std::make_unique<DqnAgent>(config, spec, seed);
  }
  if (spec.action_space.is_discrete()) {
    throw ConfigError(config.name + " needs a continuous-action environment");
  }
  if (config.name == "ddpg") return std::make_unique<DdpgAgent>(config, spec, seed);
  return std::make_unique<SacAgent>(config, spec, seed);
}

}  // namespace imrl::agents
