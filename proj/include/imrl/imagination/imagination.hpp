#pragma once

#include "imrl/agents/agent.hpp"
#include "imrl/agents/critic.hpp"
#include "imrl/core/archive.hpp"
#include "imrl/core/rng.hpp"
#include "imrl/envs/environment.hpp"
#include "imrl/nn/adam.hpp"
#include "imrl/nn/mlp.hpp"
#include "imrl/replay/replay_buffer.hpp"

#include <Eigen/Core>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace imrl::imagination {

enum class Similarity { kCosine, kBilinear };

Similarity parse_similarity(const std::string& name);
std::string to_string(Similarity s);

struct ImaginationConfig {
  bool enabled = false;
  int k = 4;             // similarity heads
  int feature_dim = 32;  // width of one head
  double momentum = 0.95;
  double loss_weight = 1.0;  // critic IM step size, as a multiple of lr
  int pairs_per_step = 0;    // 0: the agent's batch size
  bool detach_target_critic = false;
  Similarity sim = Similarity::kCosine;
  std::optional<double> lr;  // unset: the critic learning rate
  bool cross_episode_only = false;
  std::vector<int> encoder_hidden{64, 64};
  std::vector<int> din_hidden{32};

  void validate() const;
};

/// Per-head similarities v_1..v_k. Cosine heads lie in [-1, 1].
using SimilarityVector = Eigen::VectorXd;

/// Encoder input for a batch: concat(obs, encoded action) per column.
Eigen::MatrixXd encoder_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions,
                              const envs::ActionSpace& space);

/// q = enc(concat(s, a)); head i is rows [i * feature_dim, (i + 1) * feature_dim).
Eigen::VectorXd scn_features(const nn::Mlp& encoder, const Eigen::VectorXd& obs, const envs::Action& action,
                             const envs::ActionSpace& space);

/// Cosine similarity of matching head slices.
SimilarityVector similarity_vector(const Eigen::VectorXd& q, const Eigen::VectorXd& q_n, int k, int feature_dim);

/// Bilinear variant: v_i = q_i^T W_i q_n_i.
SimilarityVector bilinear_similarity_vector(const Eigen::VectorXd& q, const Eigen::VectorXd& q_n,
                                            const std::vector<Eigen::MatrixXd>& weights, int feature_dim);

/// d = din(v).
double din_difference(const nn::Mlp& din, const SimilarityVector& v);

/// Learned pieces of the mechanism. The target encoder never gets gradients
/// or optimizer state; it only tracks the online encoder through EMA.
struct ImaginationState {
  nn::Mlp online_encoder;                 // f_c
  nn::Mlp target_encoder;                 // f_d
  std::vector<nn::Mlp> dins;              // one per attached critic
  std::vector<Eigen::MatrixXd> bilinear;  // per head, bilinear similarity only
  nn::AdamState encoder_adam;
  std::vector<nn::AdamState> din_adams;
  std::vector<nn::AdamState> critic_adams;  // critics' IM steps; lr = loss_weight * lr
  nn::AdamState bilinear_adam;

  /// Target encoder starts as an exact copy of the online encoder.
  static ImaginationState create(const ImaginationConfig& config, int obs_dim, const envs::ActionSpace& space,
                                 const std::vector<const agents::Critic*>& critics, double lr, Rng& init);

  void save(Archive& ar, const std::string& prefix) const;
  void load(const Archive& ar, const std::string& prefix);
};

/// Loss and gradients of one propagation step, before any parameter moves.
struct ImGradients {
  double loss = 0.0;
  Eigen::MatrixXd similarity;     // k x B
  Eigen::RowVectorXd difference;  // d per pair
  nn::Gradients encoder;
  nn::Gradients din;
  nn::Gradients critic;
  std::vector<Eigen::MatrixXd> bilinear;
};

/// loss = mean_b (Q(s_b, a_b) + d_b - Q(s_n_b, a_n_b))^2 with the target
/// encoder's features treated as constants.
ImGradients im_gradients(const ImaginationState& state, std::size_t critic_index, const agents::Critic& critic,
                         const replay::PairBatch& pairs, const ImaginationConfig& config);

/// One propagation step on critic `critic_index`: Adam on the online encoder,
/// that critic's DIN and the critic, then the target encoder EMA. Throws
/// NonFiniteError (leaving everything untouched) if the loss or any gradient
/// is not finite.
double im_update(ImaginationState& state, std::size_t critic_index, agents::Critic& critic,
                 const replay::PairBatch& pairs, const ImaginationConfig& config);

/// An agent whose every gradient step is followed by one im_update per critic.
class ImaginationAgent final : public agents::Agent {
 public:
  ImaginationAgent(std::unique_ptr<agents::Agent> inner, const replay::ReplayBuffer& buffer,
                   ImaginationConfig config, const envs::ActionSpace& space, int obs_dim, double critic_lr,
                   int batch_size, std::uint64_t seed);

  envs::Action act(const Eigen::VectorXd& obs, agents::ActMode mode, Rng& rng) override {
    return inner_->act(obs, mode, rng);
  }
  agents::UpdateStats update(const replay::Batch& batch) override;
  std::vector<agents::Critic*> critics() override { return inner_->critics(); }
  void set_env_step(std::int64_t step) override { inner_->set_env_step(step); }

  void save(Archive& ar, const std::string& prefix) const override;
  void load(const Archive& ar, const std::string& prefix) override;

  agents::Agent& inner() { return *inner_; }
  ImaginationState& state() { return state_; }
  const ImaginationConfig& config() const { return config_; }

 private:
  std::unique_ptr<agents::Agent> inner_;
  const replay::ReplayBuffer& buffer_;
  ImaginationConfig config_;
  ImaginationState state_;
  std::size_t pairs_per_step_;
  Rng pair_rng_;
};

/// Wraps `agent`. Throws std::invalid_argument if the agent has no critic.
/// `buffer` must outlive the returned agent.
std::unique_ptr<agents::Agent> attach(std::unique_ptr<agents::Agent> agent, const replay::ReplayBuffer& buffer,
                                      const ImaginationConfig& config, const envs::ActionSpace& space, int obs_dim,
                                      double critic_lr, int batch_size, std::uint64_t seed);

}  // namespace imrl::imagination
