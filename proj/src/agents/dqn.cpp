#include "imrl/agents/dqn.hpp"

#include "imrl/core/error.hpp"
#include "widths.hpp"

#include <algorithm>

namespace imrl::agents {

Eigen::RowVectorXd dqn_td_target(const replay::Batch& batch, double gamma, const nn::Mlp& target_q) {
  if (batch.size() == 0) throw std::invalid_argument("dqn_td_target: empty batch");
  const Eigen::MatrixXd next_q = nn::forward(target_q, batch.next_obs);
  const Eigen::RowVectorXd best = next_q.colwise().maxCoeff();
  return batch.rewards.transpose().array() +
         gamma * best.array() * (1.0 - batch.done.transpose().array());
}

DqnAgent::DqnAgent(const AgentConfig& config, const EnvSpec& spec, std::uint64_t seed) : config_(config) {
  Rng init = Rng::derive(seed, "init.dqn");
  const auto w = detail::widths(spec.obs_dim, config, spec.env_name, spec.action_space.num_actions);
  critic_ = Critic(nn::Mlp::init(w, config.activation, init), Critic::Input::kActionHead, spec.action_space,
                   spec.obs_dim);
  target_ = critic_.network();
  adam_ = nn::AdamState(critic_.network(), nn::AdamConfig{config.lr_critic});
}

double DqnAgent::epsilon() const {
  const double frac = std::min(1.0, static_cast<double>(env_step_) / config_.epsilon_decay_steps);
  return config_.epsilon_start + frac * (config_.epsilon_end - config_.epsilon_start);
}

Eigen::MatrixXd DqnAgent::q_values(const Eigen::MatrixXd& obs) const { return nn::forward(critic_.network(), obs); }

int DqnAgent::greedy_action(const Eigen::VectorXd& obs) const {
  const Eigen::VectorXd q = nn::forward(critic_.network(), obs);
  Eigen::Index best = 0;
  q.maxCoeff(&best);  // first maximum on ties
  return static_cast<int>(best);
}

envs::Action DqnAgent::act(const Eigen::VectorXd& obs, ActMode mode, Rng& rng) {
  if (mode == ActMode::kExplore && rng.uniform() < epsilon()) {
    return envs::discrete_action(static_cast<int>(rng.uniform_index(critic_.action_space().num_actions)));
  }
  return envs::discrete_action(greedy_action(obs));
}

UpdateStats DqnAgent::update(const replay::Batch& batch) {
  const Eigen::RowVectorXd y = dqn_td_target(batch, config_.gamma, target_);
  Critic::Cache cache;
  const Eigen::RowVectorXd q = critic_.evaluate(batch.obs, batch.actions, &cache);
  const Eigen::RowVectorXd err = q - y;
  const double n = static_cast<double>(batch.size());
  const double loss = err.squaredNorm() / n;
  detail::require_finite(loss, "dqn_update");

  Critic::Grad g = critic_.backward(cache, (2.0 / n) * err);
  nn::adam_step(adam_, critic_.network(), g.params);
  ++updates_;
  if (updates_ % config_.target_update_period == 0) target_ = critic_.network();
  return UpdateStats{loss, 0.0, 0.0, 0.0};
}

void DqnAgent::save(Archive& ar, const std::string& prefix) const {
  critic_.network().save(ar, prefix + ".q");
  target_.save(ar, prefix + ".q_target");
  adam_.save(ar, prefix + ".adam");
  ar.meta()[prefix]["env_step"] = env_step_;
  ar.meta()[prefix]["updates"] = updates_;
}

void DqnAgent::load(const Archive& ar, const std::string& prefix) {
  critic_.network().load(ar, prefix + ".q");
  target_.load(ar, prefix + ".q_target");
  adam_.load(ar, prefix + ".adam");
  env_step_ = ar.meta().at(prefix).at("env_step").get<std::int64_t>();
  updates_ = ar.meta().at(prefix).at("updates").get<std::int64_t>();
}

}  // namespace imrl::agents
