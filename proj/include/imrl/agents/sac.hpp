#pragma once

#include "imrl/agents/agent.hpp"
#include "imrl/nn/adam.hpp"

#include <array>

namespace imrl::agents {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

/// Reparameterized squashed-Gaussian sample for a batch.
struct PolicySample {
  Eigen::MatrixXd mean;       // dim x B
  Eigen::MatrixXd log_std;    // clamped
  Eigen::MatrixXd clamp_mask; // 1 where the raw log-std was inside the clamp range
  Eigen::MatrixXd noise;      // standard normal draws
  Eigen::MatrixXd squashed;   // tanh(mean + std * noise)
  Eigen::MatrixXd action;     // squashed, mapped to the box
  Eigen::RowVectorXd log_prob;
};

/// log(1 - tanh(u)^2), stable for large |u|.
double log_one_minus_tanh_sq(double u);

class SacAgent final : public Agent {
 public:
  SacAgent(const AgentConfig& config, const EnvSpec& spec, std::uint64_t seed);

  envs::Action act(const Eigen::VectorXd& obs, ActMode mode, Rng& rng) override;
  UpdateStats update(const replay::Batch& batch) override;
  std::vector<Critic*> critics() override { return {&critics_[0], &critics_[1]}; }

  void save(Archive& ar, const std::string& prefix) const override;
  void load(const Archive& ar, const std::string& prefix) override;

  /// Squashed-Gaussian sample with the given standard-normal noise.
  PolicySample sample_policy(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& noise,
                             nn::ForwardCache* cache = nullptr) const;
  /// tanh of the mean head, mapped to the box.
  Eigen::MatrixXd mean_action(const Eigen::MatrixXd& obs) const;

  nn::Mlp& actor() { return actor_; }
  Critic& critic(int i) { return critics_[i]; }
  nn::Mlp& target_critic(int i) { return targets_[i]; }
  Rng& update_rng() { return update_rng_; }

 private:
  Eigen::MatrixXd draw_noise(Eigen::Index batch);

  AgentConfig config_;
  envs::ActionSpace space_;
  nn::Mlp actor_;
  std::array<Critic, 2> critics_;
  std::array<nn::Mlp, 2> targets_;
  nn::AdamState actor_adam_;
  std::array<nn::AdamState, 2> critic_adams_;
  Rng update_rng_;
};

}  // namespace imrl::agents
