#pragma once

#include "imrl/envs/environment.hpp"

#include <utility>

namespace imrl::envs {

struct PendulumState {
  double theta = 0.0;      // rad, 0 is upright
  double theta_dot = 0.0;  // rad/s, kept in [-8, 8]
  int steps = 0;
};

struct PendulumParams {
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kDt = 0.05;
  static constexpr double kMaxSpeed = 8.0;
  static constexpr double kMaxTorque = 2.0;
  static constexpr int kStepLimit = 200;
};

/// Maps an angle to (-pi, pi].
double wrap_angle(double theta);

Eigen::VectorXd pendulum_observation(const PendulumState& s);

/// One semi-implicit Euler step. Torque is clamped to [-2, 2]; a non-finite
/// torque throws std::invalid_argument. The reward is charged on the
/// pre-step state.
std::pair<PendulumState, StepResult> pendulum_step(const PendulumState& state, double torque);

class Pendulum final : public Environment {
 public:
  Pendulum();

  std::string_view name() const override { return "pendulum"; }
  int observation_dim() const override { return 3; }
  const ActionSpace& action_space() const override { return space_; }
  int step_limit() const override { return PendulumParams::kStepLimit; }

  Eigen::VectorXd reset(std::uint64_t seed) override;
  StepResult step(const Action& action) override;
  Eigen::VectorXd observe() const override { return pendulum_observation(state_); }
  int steps() const override { return state_.steps; }

  std::vector<double> state_vector() const override;
  void set_state_vector(const std::vector<double>& state) override;

  const PendulumState& state() const { return state_; }
  void set_state(const PendulumState& s) { state_ = s; }

 private:
  ActionSpace space_;
  PendulumState state_;
};

}  // namespace imrl::envs
