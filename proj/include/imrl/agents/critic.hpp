#pragma once

#include "imrl/envs/environment.hpp"
#include "imrl/nn/mlp.hpp"

#include <Eigen/Core>

namespace imrl::agents {

/// Q(s, a) over a parameter set. Two layouts:
///  - kActionHead: the network maps s to one value per discrete action and
///    Q(s, a) indexes the head (DQN).
///  - kStateAction: the network maps concat(s, a) to a scalar (DDPG, SAC).
class Critic {
 public:
  enum class Input { kActionHead, kStateAction };

  struct Cache {
    nn::ForwardCache net;
    Eigen::MatrixXd actions;
  };

  struct Grad {
    nn::Gradients params;
    Eigen::MatrixXd action_grad;  // kStateAction only: action_dim x B
  };

  Critic() = default;
  Critic(nn::Mlp net, Input input, envs::ActionSpace space, int obs_dim);

  /// obs: obs_dim x B, actions: stored actions (storage_dim x B).
  Eigen::RowVectorXd evaluate(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions,
                              Cache* cache = nullptr) const;
  double evaluate(const Eigen::VectorXd& obs, const envs::Action& action) const;

  /// Gradients of sum_b dq_b * Q(s_b, a_b) for the cached evaluation.
  Grad backward(const Cache& cache, const Eigen::RowVectorXd& dq) const;

  nn::Mlp& network() { return net_; }
  const nn::Mlp& network() const { return net_; }
  Input input() const { return input_; }
  const envs::ActionSpace& action_space() const { return space_; }
  int obs_dim() const { return obs_dim_; }

 private:
  Eigen::MatrixXd network_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) const;

  nn::Mlp net_;
  Input input_ = Input::kStateAction;
  envs::ActionSpace space_;
  int obs_dim_ = 0;
};

/// Stacks observations over actions: (obs_dim + action_dim) x B.
Eigen::MatrixXd concat_rows(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom);

}  // namespace imrl::agents
