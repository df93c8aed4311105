#include "imrl/envs/environment.hpp"

#include "imrl/core/error.hpp"
#include "imrl/envs/cartpole.hpp"
#include "imrl/envs/chain.hpp"
#include "imrl/envs/pendulum.hpp"

#include <cmath>

namespace imrl::envs {

ActionSpace ActionSpace::discrete(int n) {
  if (n < 1) throw std::invalid_argument("ActionSpace::discrete: need at least one action");
  ActionSpace s;
  s.kind = Kind::kDiscrete;
  s.num_actions = n;
  return s;
}

ActionSpace ActionSpace::box(Eigen::VectorXd low, Eigen::VectorXd high) {
  if (low.size() != high.size() || low.size() == 0) throw ShapeError("ActionSpace::box: bad bounds");
  if ((low.array() >= high.array()).any()) throw std::invalid_argument("ActionSpace::box: low >= high");
  ActionSpace s;
  s.kind = Kind::kBox;
  s.low = std::move(low);
  s.high = std::move(high);
  return s;
}

bool ActionSpace::contains(const Action& a) const {
  if (a.size() != storage_dim() || !a.allFinite()) return false;
  if (is_discrete()) {
    const double i = a(0);
    return i == std::floor(i) && i >= 0 && i < num_actions;
  }
  return (a.array() >= low.array()).all() && (a.array() <= high.array()).all();
}

Eigen::MatrixXd ActionSpace::encode(const Eigen::MatrixXd& actions) const {
  if (actions.rows() != storage_dim()) throw ShapeError("ActionSpace::encode: wrong action width");
  if (!is_discrete()) return actions;
  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(num_actions, actions.cols());
  for (Eigen::Index b = 0; b < actions.cols(); ++b) {
    const int i = static_cast<int>(actions(0, b));
    if (i < 0 || i >= num_actions) throw std::invalid_argument("ActionSpace::encode: index out of range");
    onehot(i, b) = 1.0;
  }
  return onehot;
}

Action ActionSpace::sample(Rng& rng) const {
  if (is_discrete()) return discrete_action(static_cast<int>(rng.uniform_index(num_actions)));
  Action a(low.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = rng.uniform(low(i), high(i));
  return a;
}

int discrete_index(const Action& a) {
  if (a.size() != 1) throw ShapeError("discrete action must have exactly one component");
  return static_cast<int>(a(0));
}

Action discrete_action(int index) {
  Action a(1);
  a(0) = index;
  return a;
}

std::unique_ptr<Environment> make_environment(std::string_view name) {
  if (name == "pendulum") return std::make_unique<Pendulum>();
  if (name == "cartpole") return std::make_unique<CartPole>();
  if (name == "chain") return std::make_unique<Chain>();
  throw ConfigError("unknown environment '" + std::string(name) + "'");
}

}  // namespace imrl::envs
