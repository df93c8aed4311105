#include "imrl/imagination/imagination.hpp"

#include "imrl/core/error.hpp"
#include "imrl/nn/ops.hpp"

#include <cmath>

namespace imrl::imagination {

void ImaginationConfig::validate() const {
  if (k < 1) throw ConfigError("im.k must be >= 1");
  if (feature_dim < 1) throw ConfigError("im.feature_dim must be >= 1");
  if (!(momentum >= 0.0 && momentum <= 1.0)) throw ConfigError("im.momentum must lie in [0, 1]");
  if (!(loss_weight >= 0.0)) throw ConfigError("im.loss_weight must be >= 0");
  if (pairs_per_step < 0) throw ConfigError("im.pairs_per_step must be >= 1 (or 0 for the batch size)");
  if (lr && !(*lr >= 0.0)) throw ConfigError("im.lr must be >= 0");
  for (int w : encoder_hidden) {
    if (w < 1) throw ConfigError("im.encoder_hidden widths must be positive");
  }
  for (int w : din_hidden) {
    if (w < 1) throw ConfigError("im.din_hidden widths must be positive");
  }
}

ImaginationState ImaginationState::create(const ImaginationConfig& config, int obs_dim,
                                          const envs::ActionSpace& space,
                                          const std::vector<const agents::Critic*>& critics, double lr, Rng& init) {
  config.validate();
  if (critics.empty()) throw std::invalid_argument("imagination: agent exposes no critic to attach to");
  const nn::AdamConfig adam{lr};

  std::vector<int> enc_widths{obs_dim + space.encoded_dim()};
  enc_widths.insert(enc_widths.end(), config.encoder_hidden.begin(), config.encoder_hidden.end());
  enc_widths.push_back(config.k * config.feature_dim);

  std::vector<int> din_widths{config.k};
  din_widths.insert(din_widths.end(), config.din_hidden.begin(), config.din_hidden.end());
  din_widths.push_back(1);

  ImaginationState s;
  s.online_encoder = nn::Mlp::init(enc_widths, nn::Activation::kTanh, init);
  s.target_encoder = s.online_encoder;
  s.encoder_adam = nn::AdamState(s.online_encoder, adam);
  for (const agents::Critic* c : critics) {
    s.dins.push_back(nn::Mlp::init(din_widths, nn::Activation::kTanh, init));
    s.din_adams.emplace_back(s.dins.back(), adam);
    // Adam is invariant to gradient scale, so the critic weight acts on the step size.
    s.critic_adams.emplace_back(c->network(), nn::AdamConfig{config.loss_weight * lr});
  }
  if (config.sim == Similarity::kBilinear) {
    s.bilinear.assign(config.k, Eigen::MatrixXd::Identity(config.feature_dim, config.feature_dim));
    s.bilinear_adam = nn::AdamState(s.bilinear, adam);
  }
  return s;
}

void ImaginationState::save(Archive& ar, const std::string& prefix) const {
  online_encoder.save(ar, prefix + ".f_c");
  target_encoder.save(ar, prefix + ".f_d");
  encoder_adam.save(ar, prefix + ".f_c_adam");
  for (std::size_t i = 0; i < dins.size(); ++i) {
    const std::string k = std::to_string(i);
    dins[i].save(ar, prefix + ".din" + k);
    din_adams[i].save(ar, prefix + ".din_adam" + k);
    critic_adams[i].save(ar, prefix + ".critic_adam" + k);
  }
  for (std::size_t i = 0; i < bilinear.size(); ++i) ar.put(prefix + ".bilinear" + std::to_string(i), bilinear[i]);
  if (!bilinear.empty()) bilinear_adam.save(ar, prefix + ".bilinear_adam");
}

void ImaginationState::load(const Archive& ar, const std::string& prefix) {
  online_encoder.load(ar, prefix + ".f_c");
  target_encoder.load(ar, prefix + ".f_d");
  encoder_adam.load(ar, prefix + ".f_c_adam");
  for (std::size_t i = 0; i < dins.size(); ++i) {
    const std::string k = std::to_string(i);
    dins[i].load(ar, prefix + ".din" + k);
    din_adams[i].load(ar, prefix + ".din_adam" + k);
    critic_adams[i].load(ar, prefix + ".critic_adam" + k);
  }
  for (std::size_t i = 0; i < bilinear.size(); ++i) ar.read(prefix + ".bilinear" + std::to_string(i), bilinear[i]);
  if (!bilinear.empty()) bilinear_adam.load(ar, prefix + ".bilinear_adam");
}

ImGradients im_gradients(const ImaginationState& state, std::size_t critic_index, const agents::Critic& critic,
                         const replay::PairBatch& pairs, const ImaginationConfig& config) {
  if (critic_index >= state.dins.size()) throw std::out_of_range("im_gradients: no DIN for this critic");
  const Eigen::Index batch = static_cast<Eigen::Index>(pairs.first.size());
  if (batch == 0 || pairs.second.size() != pairs.first.size()) {
    throw std::invalid_argument("im_gradients: need a nonempty batch of pairs");
  }
  const int k = config.k;
  const int fd = config.feature_dim;
  const bool bilinear = config.sim == Similarity::kBilinear;
  const envs::ActionSpace& space = critic.action_space();
  const nn::Mlp& din = state.dins[critic_index];

  nn::ForwardCache enc_cache;
  const Eigen::MatrixXd q =
      nn::forward(state.online_encoder, encoder_input(pairs.first.obs, pairs.first.actions, space), &enc_cache);
  // Target-encoder features enter as constants: no cache, no backward.
  const Eigen::MatrixXd q_n =
      nn::forward(state.target_encoder, encoder_input(pairs.second.obs, pairs.second.actions, space));
  if (q.rows() != k * fd) throw ShapeError("im_gradients: encoder width must equal k * feature_dim");

  ImGradients out;
  out.similarity.resize(k, batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (int i = 0; i < k; ++i) {
      const auto u = q.col(b).segment(i * fd, fd);
      const auto w = q_n.col(b).segment(i * fd, fd);
      out.similarity(i, b) = bilinear ? u.dot(state.bilinear[i] * w) : nn::cosine_similarity(u, w);
    }
  }

  nn::ForwardCache din_cache;
  out.difference = nn::forward(din, out.similarity, &din_cache).row(0);

  agents::Critic::Cache anchor_cache;
  agents::Critic::Cache partner_cache;
  const Eigen::RowVectorXd q_anchor = critic.evaluate(pairs.first.obs, pairs.first.actions, &anchor_cache);
  const Eigen::RowVectorXd q_partner = critic.evaluate(
      pairs.second.obs, pairs.second.actions, config.detach_target_critic ? nullptr : &partner_cache);

  const Eigen::RowVectorXd residual = q_anchor + out.difference - q_partner;
  const double n = static_cast<double>(batch);
  out.loss = residual.squaredNorm() / n;
  const Eigen::RowVectorXd g = (2.0 / n) * residual;

  nn::BackwardResult din_back = nn::backward(din, din_cache, g);
  out.din = std::move(din_back.grads);
  const Eigen::MatrixXd& d_sim = din_back.input_grad;  // k x B

  Eigen::MatrixXd d_q = Eigen::MatrixXd::Zero(k * fd, batch);
  if (bilinear) out.bilinear.assign(k, Eigen::MatrixXd::Zero(fd, fd));
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (int i = 0; i < k; ++i) {
      const Eigen::VectorXd u = q.col(b).segment(i * fd, fd);
      const Eigen::VectorXd w = q_n.col(b).segment(i * fd, fd);
      auto du = d_q.col(b).segment(i * fd, fd);
      if (bilinear) {
        du = d_sim(i, b) * (state.bilinear[i] * w);
        out.bilinear[i] += d_sim(i, b) * u * w.transpose();
        continue;
      }
      const double nu = u.norm();
      const double nw = w.norm();
      if (nu < nn::kCosineNormFloor || nw < nn::kCosineNormFloor) continue;
      const double c = u.dot(w) / (nu * nw);
      du = d_sim(i, b) * (w / (nu * nw) - (c / (nu * nu)) * u);
    }
  }
  out.encoder = nn::backward(state.online_encoder, enc_cache, d_q).grads;

  out.critic = critic.backward(anchor_cache, g).params;
  if (!config.detach_target_critic) out.critic += critic.backward(partner_cache, -g).params;
  return out;
}

double im_update(ImaginationState& state, std::size_t critic_index, agents::Critic& critic,
                 const replay::PairBatch& pairs, const ImaginationConfig& config) {
  ImGradients grads = im_gradients(state, critic_index, critic, pairs, config);
  bool finite = std::isfinite(grads.loss) && grads.encoder.all_finite() && grads.din.all_finite() &&
                grads.critic.all_finite();
  for (const auto& w : grads.bilinear) finite = finite && w.allFinite();
  if (!finite) {
    throw NonFiniteError("im_update: non-finite loss or gradient (loss " + std::to_string(grads.loss) +
                         ", critic " + std::to_string(critic_index) + ")");
  }
  nn::adam_step(state.encoder_adam, state.online_encoder, grads.encoder);
  nn::adam_step(state.din_adams[critic_index], state.dins[critic_index], grads.din);
  nn::adam_step(state.critic_adams[critic_index], critic.network(), grads.critic);
  if (!state.bilinear.empty()) nn::adam_step(state.bilinear_adam, state.bilinear, grads.bilinear);
  nn::ema_update(state.target_encoder, state.online_encoder, config.momentum);
  return grads.loss;
}

}  // namespace imrl::imagination
