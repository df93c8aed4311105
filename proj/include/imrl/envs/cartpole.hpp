#pragma once

#include "imrl/envs/environment.hpp"

#include <numbers>
#include <utility>

namespace imrl::envs {

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  int steps = 0;
};

struct CartPoleParams {
  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kForce = 10.0;
  static constexpr double kDt = 0.02;
  static constexpr double kXLimit = 2.4;
  static constexpr double kThetaLimit = 12.0 * 2.0 * std::numbers::pi / 360.0;
  static constexpr int kStepLimit = 500;
};

Eigen::VectorXd cartpole_observation(const CartPoleState& s);

/// Explicit Euler step; action 0 pushes left, 1 pushes right. Any other
/// index throws std::invalid_argument.
std::pair<CartPoleState, StepResult> cartpole_step(const CartPoleState& state, int action);

class CartPole final : public Environment {
 public:
  CartPole() : space_(ActionSpace::discrete(2)) {}

  std::string_view name() const override { return "cartpole"; }
  int observation_dim() const override { return 4; }
  const ActionSpace& action_space() const override { return space_; }
  int step_limit() const override { return CartPoleParams::kStepLimit; }

  Eigen::VectorXd reset(std::uint64_t seed) override;
  StepResult step(const Action& action) override;
  Eigen::VectorXd observe() const override { return cartpole_observation(state_); }
  int steps() const override { return state_.steps; }

  std::vector<double> state_vector() const override;
  void set_state_vector(const std::vector<double>& state) override;

  const CartPoleState& state() const { return state_; }
  void set_state(const CartPoleState& s) { state_ = s; }

 private:
  ActionSpace space_;
  CartPoleState state_;
};

}  // namespace imrl::envs
