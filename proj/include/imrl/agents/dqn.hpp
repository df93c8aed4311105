#pragma once

#include "imrl/agents/agent.hpp"
#include "imrl/nn/adam.hpp"

namespace imrl::agents {

/// y_b = r_b + gamma * max_a' Q_target(s'_b, a') * (1 - done_b). Truncated
/// transitions still bootstrap.
Eigen::RowVectorXd dqn_td_target(const replay::Batch& batch, double gamma, const nn::Mlp& target_q);

class DqnAgent final : public Agent {
 public:
  DqnAgent(const AgentConfig& config, const EnvSpec& spec, std::uint64_t seed);

  envs::Action act(const Eigen::VectorXd& obs, ActMode mode, Rng& rng) override;
  UpdateStats update(const replay::Batch& batch) override;
  std::vector<Critic*> critics() override { return {&critic_}; }
  void set_env_step(std::int64_t step) override { env_step_ = step; }

  void save(Archive& ar, const std::string& prefix) const override;
  void load(const Archive& ar, const std::string& prefix) override;

  double epsilon() const;
  int greedy_action(const Eigen::VectorXd& obs) const;
  Eigen::MatrixXd q_values(const Eigen::MatrixXd& obs) const;

  const Critic& critic() const { return critic_; }
  Critic& critic() { return critic_; }
  const nn::Mlp& target() const { return target_; }
  nn::Mlp& target() { return target_; }
  std::int64_t updates() const { return updates_; }

 private:
  AgentConfig config_;
  Critic critic_;
  nn::Mlp target_;
  nn::AdamState adam_;
  std::int64_t env_step_ = 0;
  std::int64_t updates_ = 0;
};

}  // namespace imrl::agents
