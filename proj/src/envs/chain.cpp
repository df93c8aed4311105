#include "imrl/envs/chain.hpp"

#include "imrl/core/error.hpp"

#include <algorithm>

namespace imrl::envs {

using P = ChainParams;

Eigen::VectorXd chain_observation(const ChainState& s) {
  Eigen::VectorXd obs = Eigen::VectorXd::Zero(P::kNumStates);
  obs(s.position) = 1.0;
  return obs;
}

std::pair<ChainState, StepResult> chain_step(const ChainState& state, int action) {
  if (state.position < 0 || state.position >= P::kNumStates) {
    throw std::invalid_argument("chain_step: position out of range");
  }
  if (action != P::kLeft && action != P::kRight) {
    throw std::invalid_argument("chain_step: action must be 0 (L) or 1 (R)");
  }
  ChainState next = state;
  next.position = action == P::kRight ? std::min(state.position + 1, P::kGoal)
                                      : std::max(state.position - 1, 0);
  next.steps = state.steps + 1;

  StepResult r;
  r.observation = chain_observation(next);
  r.done = next.position == P::kGoal;
  r.reward = r.done ? 1.0 : 0.0;
  r.truncated = !r.done && next.steps >= P::kStepLimit;
  return {next, r};
}

Eigen::VectorXd Chain::reset(std::uint64_t) {
  state_ = ChainState{};
  return observe();
}

StepResult Chain::step(const Action& action) {
  auto [next, result] = chain_step(state_, discrete_index(action));
  state_ = next;
  return result;
}

std::vector<double> Chain::state_vector() const {
  return {static_cast<double>(state_.position), static_cast<double>(state_.steps)};
}

void Chain::set_state_vector(const std::vector<double>& s) {
  if (s.size() != 2) throw ShapeError("Chain: state vector must have 2 entries");
  state_ = {static_cast<int>(s[0]), static_cast<int>(s[1])};
}

}  // namespace imrl::envs
