#include "imrl/envs/cartpole.hpp"

#include "imrl/core/error.hpp"

#include <cmath>

namespace imrl::envs {

using P = CartPoleParams;

Eigen::VectorXd cartpole_observation(const CartPoleState& s) {
  Eigen::VectorXd obs(4);
  obs << s.x, s.x_dot, s.theta, s.theta_dot;
  return obs;
}

std::pair<CartPoleState, StepResult> cartpole_step(const CartPoleState& state, int action) {
  if (action != 0 && action != 1) {
    throw std::invalid_argument("cartpole_step: action must be 0 or 1, got " + std::to_string(action));
  }
  constexpr double total_mass = P::kCartMass + P::kPoleMass;
  constexpr double pole_moment = P::kPoleMass * P::kHalfLength;
  const double force = action == 1 ? P::kForce : -P::kForce;
  const double cos_t = std::cos(state.theta);
  const double sin_t = std::sin(state.theta);

  const double temp = (force + pole_moment * state.theta_dot * state.theta_dot * sin_t) / total_mass;
  const double theta_acc = (P::kGravity * sin_t - cos_t * temp) /
                           (P::kHalfLength * (4.0 / 3.0 - P::kPoleMass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_moment * theta_acc * cos_t / total_mass;

  CartPoleState next;
  next.x = state.x + P::kDt * state.x_dot;
  next.x_dot = state.x_dot + P::kDt * x_acc;
  next.theta = state.theta + P::kDt * state.theta_dot;
  next.theta_dot = state.theta_dot + P::kDt * theta_acc;
  next.steps = state.steps + 1;

  StepResult r;
  r.observation = cartpole_observation(next);
  r.reward = 1.0;
  r.done = std::abs(next.x) > P::kXLimit || std::abs(next.theta) > P::kThetaLimit;
  r.truncated = !r.done && next.steps >= P::kStepLimit;
  return {next, r};
}

Eigen::VectorXd CartPole::reset(std::uint64_t seed) {
  Rng rng(seed);
  state_.x = rng.uniform(-0.05, 0.05);
  state_.x_dot = rng.uniform(-0.05, 0.05);
  state_.theta = rng.uniform(-0.05, 0.05);
  state_.theta_dot = rng.uniform(-0.05, 0.05);
  state_.steps = 0;
  return observe();
}

StepResult CartPole::step(const Action& action) {
  auto [next, result] = cartpole_step(state_, discrete_index(action));
  state_ = next;
  return result;
}

std::vector<double> CartPole::state_vector() const {
  return {state_.x, state_.x_dot, state_.theta, state_.theta_dot, static_cast<double>(state_.steps)};
}

void CartPole::set_state_vector(const std::vector<double>& s) {
  if (s.size() != 5) throw ShapeError("CartPole: state vector must have 5 entries");
  state_ = {s[0], s[1], s[2], s[3], static_cast<int>(s[4])};
}

}  // namespace imrl::envs
