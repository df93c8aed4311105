#pragma once

#include "imrl/agents/agent.hpp"
#include "imrl/nn/adam.hpp"

namespace imrl::agents {

class DdpgAgent final : public Agent {
 public:
  DdpgAgent(const AgentConfig& config, const EnvSpec& spec, std::uint64_t seed);

  envs::Action act(const Eigen::VectorXd& obs, ActMode mode, Rng& rng) override;
  UpdateStats update(const replay::Batch& batch) override;
  std::vector<Critic*> critics() override { return {&critic_}; }

  void save(Archive& ar, const std::string& prefix) const override;
  void load(const Archive& ar, const std::string& prefix) override;

  /// Deterministic policy mu(s) squashed into the action box.
  Eigen::MatrixXd policy(const Eigen::MatrixXd& obs, const nn::Mlp& actor) const;

  Critic& critic() { return critic_; }
  nn::Mlp& actor() { return actor_; }
  nn::Mlp& target_actor() { return target_actor_; }
  nn::Mlp& target_critic() { return target_critic_; }

 private:
  AgentConfig config_;
  envs::ActionSpace space_;
  nn::Mlp actor_;
  nn::Mlp target_actor_;
  Critic critic_;
  nn::Mlp target_critic_;
  nn::AdamState actor_adam_;
  nn::AdamState critic_adam_;
};

}  // namespace imrl::agents
