#pragma once

#include "imrl/envs/environment.hpp"

#include <utility>

namespace imrl::envs {

/// Five-state corridor. Start at 0; reaching 4 pays 1 and terminates.
struct ChainState {
  int position = 0;
  int steps = 0;
};

struct ChainParams {
  static constexpr int kNumStates = 5;
  static constexpr int kGoal = 4;
  static constexpr int kLeft = 0;
  static constexpr int kRight = 1;
  static constexpr int kStepLimit = 50;
};

Eigen::VectorXd chain_observation(const ChainState& s);

std::pair<ChainState, StepResult> chain_step(const ChainState& state, int action);

class Chain final : public Environment {
 public:
  Chain() : space_(ActionSpace::discrete(2)) {}

  std::string_view name() const override { return "chain"; }
  int observation_dim() const override { return ChainParams::kNumStates; }
  const ActionSpace& action_space() const override { return space_; }
  int step_limit() const override { return ChainParams::kStepLimit; }

  Eigen::VectorXd reset(std::uint64_t seed) override;
  StepResult step(const Action& action) override;
  Eigen::VectorXd observe() const override { return chain_observation(state_); }
  int steps() const override { return state_.steps; }

  std::vector<double> state_vector() const override;
  void set_state_vector(const std::vector<double>& state) override;

  const ChainState& state() const { return state_; }
  void set_state(const ChainState& s) { state_ = s; }

 private:
  ActionSpace space_;
  ChainState state_;
};

}  // namespace imrl::envs
