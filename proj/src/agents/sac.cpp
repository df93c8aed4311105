#include "imrl/agents/sac.hpp"

#include "imrl/core/error.hpp"
#include "imrl/nn/ops.hpp"
#include "widths.hpp"

#include <cmath>
#include <numbers>

namespace imrl::agents {

double log_one_minus_tanh_sq(double u) {
  // log(1 - tanh(u)^2) = 2 * (log 2 - u - softplus(-2u))
  const double x = -2.0 * u;
  const double softplus = std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
  return 2.0 * (std::numbers::ln2 - u - softplus);
}

SacAgent::SacAgent(const AgentConfig& config, const EnvSpec& spec, std::uint64_t seed)
    : config_(config), space_(spec.action_space), update_rng_(Rng::derive(seed, "update.sac")) {
  Rng init = Rng::derive(seed, "init.sac");
  const int dim = space_.encoded_dim();
  actor_ = nn::Mlp::init(detail::widths(spec.obs_dim, config, spec.env_name, 2 * dim), config.activation, init);
  for (int i = 0; i < 2; ++i) {
    critics_[i] = Critic(
        nn::Mlp::init(detail::widths(spec.obs_dim + dim, config, spec.env_name, 1), config.activation, init),
        Critic::Input::kStateAction, space_, spec.obs_dim);
    targets_[i] = critics_[i].network();
    critic_adams_[i] = nn::AdamState(critics_[i].network(), nn::AdamConfig{config.lr_critic});
  }
  actor_adam_ = nn::AdamState(actor_, nn::AdamConfig{config.lr_actor});
}

PolicySample SacAgent::sample_policy(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& noise,
                                     nn::ForwardCache* cache) const {
  const Eigen::Index dim = space_.encoded_dim();
  const Eigen::MatrixXd out = nn::forward(actor_, obs, cache);
  if (noise.rows() != dim || noise.cols() != obs.cols()) throw ShapeError("sample_policy: noise shape mismatch");
  PolicySample s;
  s.mean = out.topRows(dim);
  const Eigen::MatrixXd raw_log_std = out.bottomRows(dim);
  s.log_std = raw_log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  s.clamp_mask = ((raw_log_std.array() >= kLogStdMin) && (raw_log_std.array() <= kLogStdMax)).cast<double>();
  s.noise = noise;
  const Eigen::MatrixXd u = s.mean.array() + s.log_std.array().exp() * noise.array();
  s.squashed = u.array().tanh();
  const Eigen::VectorXd half = 0.5 * (space_.high - space_.low);
  s.action = (s.squashed.array().colwise() * half.array()).colwise() + (0.5 * (space_.high + space_.low)).array();

  const double log_sqrt_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  s.log_prob.resize(obs.cols());
  for (Eigen::Index b = 0; b < obs.cols(); ++b) {
    double lp = 0.0;
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double e = noise(j, b);
      lp += -0.5 * e * e - s.log_std(j, b) - log_sqrt_2pi - std::log(half(j)) - log_one_minus_tanh_sq(u(j, b));
    }
    s.log_prob(b) = lp;
  }
  return s;
}

Eigen::MatrixXd SacAgent::mean_action(const Eigen::MatrixXd& obs) const {
  const Eigen::MatrixXd out = nn::forward(actor_, obs);
  return squash_to_box(out.topRows(space_.encoded_dim()), space_);
}

Eigen::MatrixXd SacAgent::draw_noise(Eigen::Index batch) {
  Eigen::MatrixXd noise(space_.encoded_dim(), batch);
  for (Eigen::Index b = 0; b < batch; ++b)
    for (Eigen::Index j = 0; j < noise.rows(); ++j) noise(j, b) = update_rng_.normal();
  return noise;
}

envs::Action SacAgent::act(const Eigen::VectorXd& obs, ActMode mode, Rng& rng) {
  if (mode == ActMode::kEval) return mean_action(Eigen::MatrixXd(obs)).col(0);
  Eigen::MatrixXd noise(space_.encoded_dim(), 1);
  for (Eigen::Index j = 0; j < noise.rows(); ++j) noise(j, 0) = rng.normal();
  return sample_policy(Eigen::MatrixXd(obs), noise).action.col(0);
}

UpdateStats SacAgent::update(const replay::Batch& batch) {
  const double n = static_cast<double>(batch.size());
  const double alpha = config_.alpha;

  // Soft bootstrapped target with a fresh next action and the twin minimum.
  const PolicySample next = sample_policy(batch.next_obs, draw_noise(batch.next_obs.cols()));
  const Eigen::MatrixXd next_in = concat_rows(batch.next_obs, next.action);
  const Eigen::RowVectorXd tq0 = nn::forward(targets_[0], next_in).row(0);
  const Eigen::RowVectorXd tq1 = nn::forward(targets_[1], next_in).row(0);
  const Eigen::RowVectorXd soft_value = tq0.cwiseMin(tq1).array() - alpha * next.log_prob.array();
  const Eigen::RowVectorXd y =
      batch.rewards.transpose().array() + config_.gamma * soft_value.array() * (1.0 - batch.done.transpose().array());

  double critic_loss = 0.0;
  for (int i = 0; i < 2; ++i) {
    Critic::Cache cache;
    const Eigen::RowVectorXd err = critics_[i].evaluate(batch.obs, batch.actions, &cache) - y;
    const double loss = err.squaredNorm() / n;
    detail::require_finite(loss, "sac_update (critic)");
    nn::adam_step(critic_adams_[i], critics_[i].network(), critics_[i].backward(cache, (2.0 / n) * err).params);
    critic_loss += 0.5 * loss;
  }

  // Actor: minimize alpha * log pi(a|s) - min_i Q_i(s, a), a reparameterized.
  nn::ForwardCache actor_cache;
  const PolicySample pi = sample_policy(batch.obs, draw_noise(batch.obs.cols()), &actor_cache);
  std::array<Critic::Cache, 2> caches;
  const Eigen::RowVectorXd q0 = critics_[0].evaluate(batch.obs, pi.action, &caches[0]);
  const Eigen::RowVectorXd q1 = critics_[1].evaluate(batch.obs, pi.action, &caches[1]);
  const Eigen::RowVectorXd q_min = q0.cwiseMin(q1);
  const double actor_loss = (alpha * pi.log_prob.array() - q_min.array()).mean();
  detail::require_finite(actor_loss, "sac_update (actor)");

  Eigen::RowVectorXd dq0 = Eigen::RowVectorXd::Zero(q0.size());
  Eigen::RowVectorXd dq1 = Eigen::RowVectorXd::Zero(q1.size());
  for (Eigen::Index b = 0; b < q0.size(); ++b) (q0(b) <= q1(b) ? dq0 : dq1)(b) = -1.0 / n;
  const Eigen::MatrixXd d_action =
      critics_[0].backward(caches[0], dq0).action_grad + critics_[1].backward(caches[1], dq1).action_grad;

  const Eigen::VectorXd half = 0.5 * (space_.high - space_.low);
  const Eigen::MatrixXd one_minus_t2 = 1.0 - pi.squashed.array().square();
  // d/du of the per-sample loss: alpha * d(log pi)/du = alpha * 2 tanh(u), plus the Q path.
  const Eigen::MatrixXd d_u = (alpha / n) * 2.0 * pi.squashed.array() +
                              (d_action.array().colwise() * half.array()) * one_minus_t2.array();
  const Eigen::MatrixXd std_noise = pi.log_std.array().exp() * pi.noise.array();
  const Eigen::MatrixXd d_log_std = (-alpha / n + d_u.array() * std_noise.array()) * pi.clamp_mask.array();
  const Eigen::MatrixXd upstream = concat_rows(d_u, d_log_std);
  nn::adam_step(actor_adam_, actor_, nn::backward(actor_, actor_cache, upstream).grads);

  for (int i = 0; i < 2; ++i) nn::ema_update(targets_[i], critics_[i].network(), 1.0 - config_.polyak);
  return UpdateStats{critic_loss, actor_loss, 0.0, alpha};
}

void SacAgent::save(Archive& ar, const std::string& prefix) const {
  actor_.save(ar, prefix + ".actor");
  actor_adam_.save(ar, prefix + ".actor_adam");
  for (int i = 0; i < 2; ++i) {
    const std::string k = std::to_string(i);
    critics_[i].network().save(ar, prefix + ".critic" + k);
    targets_[i].save(ar, prefix + ".critic_target" + k);
    critic_adams_[i].save(ar, prefix + ".critic_adam" + k);
  }
  ar.meta()[prefix]["update_rng"] = update_rng_.state();
}

void SacAgent::load(const Archive& ar, const std::string& prefix) {
  actor_.load(ar, prefix + ".actor");
  actor_adam_.load(ar, prefix + ".actor_adam");
  for (int i = 0; i < 2; ++i) {
    const std::string k = std::to_string(i);
    critics_[i].network().load(ar, prefix + ".critic" + k);
    targets_[i].load(ar, prefix + ".critic_target" + k);
    critic_adams_[i].load(ar, prefix + ".critic_adam" + k);
  }
  update_rng_.set_state(ar.meta().at(prefix).at("update_rng").get<std::string>());
}

}  // namespace imrl::agents
