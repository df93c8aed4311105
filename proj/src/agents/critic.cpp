#include "imrl/agents/critic.hpp"

#include "imrl/core/error.hpp"

namespace imrl::agents {

Eigen::MatrixXd concat_rows(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom) {
  if (top.cols() != bottom.cols()) throw ShapeError("concat_rows: batch sizes differ");
  Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

Critic::Critic(nn::Mlp net, Input input, envs::ActionSpace space, int obs_dim)
    : net_(std::move(net)), input_(input), space_(std::move(space)), obs_dim_(obs_dim) {
  if (input_ == Input::kActionHead) {
    if (!space_.is_discrete()) throw std::invalid_argument("Critic: action-head layout needs discrete actions");
    if (net_.input_dim() != obs_dim_ || net_.output_dim() != space_.num_actions) {
      throw ShapeError("Critic: action-head network must map obs_dim -> num_actions");
    }
  } else if (net_.input_dim() != obs_dim_ + space_.encoded_dim() || net_.output_dim() != 1) {
    throw ShapeError("Critic: state-action network must map obs_dim + action_dim -> 1");
  }
}

Eigen::MatrixXd Critic::network_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) const {
  if (obs.rows() != obs_dim_) throw ShapeError("Critic: observation width mismatch");
  if (actions.cols() != obs.cols()) throw ShapeError("Critic: batch size mismatch");
  if (input_ == Input::kActionHead) return obs;
  return concat_rows(obs, space_.encode(actions));
}

Eigen::RowVectorXd Critic::evaluate(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions,
                                    Cache* cache) const {
  Eigen::MatrixXd out = nn::forward(net_, network_input(obs, actions), cache ? &cache->net : nullptr);
  if (cache) cache->actions = actions;
  if (input_ == Input::kStateAction) return out.row(0);
  Eigen::RowVectorXd q(obs.cols());
  for (Eigen::Index b = 0; b < obs.cols(); ++b) {
    const int a = static_cast<int>(actions(0, b));
    if (a < 0 || a >= space_.num_actions) throw std::invalid_argument("Critic: action index out of range");
    q(b) = out(a, b);
  }
  return q;
}

double Critic::evaluate(const Eigen::VectorXd& obs, const envs::Action& action) const {
  return evaluate(Eigen::MatrixXd(obs), Eigen::MatrixXd(action))(0);
}

Critic::Grad Critic::backward(const Cache& cache, const Eigen::RowVectorXd& dq) const {
  const Eigen::Index batch = cache.actions.cols();
  if (dq.size() != batch) throw ShapeError("Critic::backward: upstream length mismatch");
  Eigen::MatrixXd upstream;
  if (input_ == Input::kActionHead) {
    upstream.setZero(space_.num_actions, batch);
    for (Eigen::Index b = 0; b < batch; ++b) upstream(static_cast<Eigen::Index>(cache.actions(0, b)), b) = dq(b);
  } else {
    upstream = dq;
  }
  nn::BackwardResult r = nn::backward(net_, cache.net, upstream);
  Grad g{std::move(r.grads), {}};
  if (input_ == Input::kStateAction) g.action_grad = r.input_grad.bottomRows(space_.encoded_dim());
  return g;
}

}  // namespace imrl::agents
