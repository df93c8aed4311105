#include "imrl/envs/pendulum.hpp"

#include "imrl/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace imrl::envs {

using P = PendulumParams;

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return theta - two_pi * std::ceil((theta - std::numbers::pi) / two_pi);
}

Eigen::VectorXd pendulum_observation(const PendulumState& s) {
  Eigen::VectorXd obs(3);
  obs << std::cos(s.theta), std::sin(s.theta), s.theta_dot;
  return obs;
}

std::pair<PendulumState, StepResult> pendulum_step(const PendulumState& state, double torque) {
  if (!std::isfinite(torque)) throw std::invalid_argument("pendulum_step: non-finite torque");
  const double u = std::clamp(torque, -P::kMaxTorque, P::kMaxTorque);
  const double th = wrap_angle(state.theta);
  const double cost = th * th + 0.1 * state.theta_dot * state.theta_dot + 0.001 * u * u;

  PendulumState next = state;
  const double accel = 3.0 * P::kGravity / (2.0 * P::kLength) * std::sin(state.theta) +
                       3.0 * u / (P::kMass * P::kLength * P::kLength);
  next.theta_dot = std::clamp(state.theta_dot + accel * P::kDt, -P::kMaxSpeed, P::kMaxSpeed);
  next.theta = state.theta + next.theta_dot * P::kDt;
  next.steps = state.steps + 1;

  StepResult r;
  r.observation = pendulum_observation(next);
  r.reward = -cost;
  r.done = false;
  r.truncated = next.steps >= P::kStepLimit;
  return {next, r};
}

Pendulum::Pendulum()
    : space_(ActionSpace::box(Eigen::VectorXd::Constant(1, -P::kMaxTorque),
                              Eigen::VectorXd::Constant(1, P::kMaxTorque))) {}

Eigen::VectorXd Pendulum::reset(std::uint64_t seed) {
  Rng rng(seed);
  state_.theta = rng.uniform(-std::numbers::pi, std::numbers::pi);
  state_.theta_dot = rng.uniform(-1.0, 1.0);
  state_.steps = 0;
  return observe();
}

StepResult Pendulum::step(const Action& action) {
  if (action.size() != 1) throw ShapeError("Pendulum::step: action must have one component");
  auto [next, result] = pendulum_step(state_, action(0));
  state_ = next;
  return result;
}

std::vector<double> Pendulum::state_vector() const {
  return {state_.theta, state_.theta_dot, static_cast<double>(state_.steps)};
}

void Pendulum::set_state_vector(const std::vector<double>& s) {
  if (s.size() != 3) throw ShapeError("Pendulum: state vector must have 3 entries");
  state_ = {s[0], s[1], static_cast<int>(s[2])};
}

}  // namespace imrl::envs
