#include "imrl/agents/ddpg.hpp"

#include "imrl/core/error.hpp"
#include "imrl/nn/ops.hpp"
#include "widths.hpp"

namespace imrl::agents {

DdpgAgent::DdpgAgent(const AgentConfig& config, const EnvSpec& spec, std::uint64_t seed)
    : config_(config), space_(spec.action_space) {
  Rng init = Rng::derive(seed, "init.ddpg");
  const int dim = space_.encoded_dim();
  actor_ = nn::Mlp::init(detail::widths(spec.obs_dim, config, spec.env_name, dim), config.activation, init);
  critic_ = Critic(nn::Mlp::init(detail::widths(spec.obs_dim + dim, config, spec.env_name, 1), config.activation, init),
                   Critic::Input::kStateAction, space_, spec.obs_dim);
  target_actor_ = actor_;
  target_critic_ = critic_.network();
  actor_adam_ = nn::AdamState(actor_, nn::AdamConfig{config.lr_actor});
  critic_adam_ = nn::AdamState(critic_.network(), nn::AdamConfig{config.lr_critic});
}

Eigen::MatrixXd DdpgAgent::policy(const Eigen::MatrixXd& obs, const nn::Mlp& actor) const {
  return squash_to_box(nn::forward(actor, obs), space_);
}

envs::Action DdpgAgent::act(const Eigen::VectorXd& obs, ActMode mode, Rng& rng) {
  envs::Action a = policy(Eigen::MatrixXd(obs), actor_).col(0);
  if (mode == ActMode::kEval) return a;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double sigma = config_.exploration_noise * (space_.high(i) - space_.low(i));
    a(i) = std::clamp(a(i) + sigma * rng.normal(), space_.low(i), space_.high(i));
  }
  return a;
}

UpdateStats DdpgAgent::update(const replay::Batch& batch) {
  const double n = static_cast<double>(batch.size());

  // Critic regression toward the target networks' bootstrapped value.
  const Eigen::MatrixXd next_actions = policy(batch.next_obs, target_actor_);
  const Eigen::RowVectorXd next_q =
      nn::forward(target_critic_, concat_rows(batch.next_obs, next_actions)).row(0);
  const Eigen::RowVectorXd y = batch.rewards.transpose().array() +
                               config_.gamma * next_q.array() * (1.0 - batch.done.transpose().array());
  Critic::Cache cache;
  const Eigen::RowVectorXd err = critic_.evaluate(batch.obs, batch.actions, &cache) - y;
  const double critic_loss = err.squaredNorm() / n;
  detail::require_finite(critic_loss, "ddpg_update (critic)");
  nn::adam_step(critic_adam_, critic_.network(), critic_.backward(cache, (2.0 / n) * err).params);

  // Actor ascends Q(s, mu(s)).
  nn::ForwardCache actor_cache;
  const Eigen::MatrixXd raw = nn::forward(actor_, batch.obs, &actor_cache);
  const Eigen::MatrixXd squashed = raw.array().tanh();
  const Eigen::VectorXd half = 0.5 * (space_.high - space_.low);
  const Eigen::MatrixXd actions =
      (squashed.array().colwise() * half.array()).colwise() + (0.5 * (space_.high + space_.low)).array();
  Critic::Cache pi_cache;
  const Eigen::RowVectorXd q_pi = critic_.evaluate(batch.obs, actions, &pi_cache);
  const double actor_loss = -q_pi.mean();
  detail::require_finite(actor_loss, "ddpg_update (actor)");
  const Critic::Grad qg = critic_.backward(pi_cache, Eigen::RowVectorXd::Constant(q_pi.size(), -1.0 / n));
  Eigen::MatrixXd d_raw = qg.action_grad.array().colwise() * half.array();
  d_raw.array() *= 1.0 - squashed.array().square();
  nn::adam_step(actor_adam_, actor_, nn::backward(actor_, actor_cache, d_raw).grads);

  nn::ema_update(target_critic_, critic_.network(), 1.0 - config_.polyak);
  nn::ema_update(target_actor_, actor_, 1.0 - config_.polyak);
  return UpdateStats{critic_loss, actor_loss, 0.0, 0.0};
}

void DdpgAgent::save(Archive& ar, const std::string& prefix) const {
  actor_.save(ar, prefix + ".actor");
  target_actor_.save(ar, prefix + ".actor_target");
  critic_.network().save(ar, prefix + ".critic");
  target_critic_.save(ar, prefix + ".critic_target");
  actor_adam_.save(ar, prefix + ".actor_adam");
  critic_adam_.save(ar, prefix + ".critic_adam");
}

void DdpgAgent::load(const Archive& ar, const std::string& prefix) {
  actor_.load(ar, prefix + ".actor");
  target_actor_.load(ar, prefix + ".actor_target");
  critic_.network().load(ar, prefix + ".critic");
  target_critic_.load(ar, prefix + ".critic_target");
  actor_adam_.load(ar, prefix + ".actor_adam");
  critic_adam_.load(ar, prefix + ".critic_adam");
}

}  // namespace imrl::agents
