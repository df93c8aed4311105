#pragma once

#include "imrl/core/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace imrl::envs {

/// Discrete actions are stored as a length-1 vector holding the index;
/// continuous actions as the raw vector.
using Action = Eigen::VectorXd;

struct ActionSpace {
  enum class Kind { kDiscrete, kBox };

  Kind kind = Kind::kDiscrete;
  int num_actions = 0;   // discrete only
  Eigen::VectorXd low;   // box only
  Eigen::VectorXd high;  // box only

  static ActionSpace discrete(int n);
  static ActionSpace box(Eigen::VectorXd low, Eigen::VectorXd high);

  bool is_discrete() const { return kind == Kind::kDiscrete; }
  /// Width of the stored action vector.
  int storage_dim() const { return is_discrete() ? 1 : static_cast<int>(low.size()); }
  /// Width after one-hot encoding (discrete) or identity (box).
  int encoded_dim() const { return is_discrete() ? num_actions : static_cast<int>(low.size()); }

  bool contains(const Action& a) const;
  /// Stored actions (storage_dim x B) to network inputs (encoded_dim x B).
  Eigen::MatrixXd encode(const Eigen::MatrixXd& actions) const;
  Action sample(Rng& rng) const;
};

int discrete_index(const Action& a);
Action discrete_action(int index);

struct StepResult {
  Eigen::VectorXd observation;
  double reward = 0.0;
  bool done = false;       // terminal dynamics reached
  bool truncated = false;  // step cap hit
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string_view name() const = 0;
  virtual int observation_dim() const = 0;
  virtual const ActionSpace& action_space() const = 0;
  virtual int step_limit() const = 0;

  /// Draws the initial state using only `seed`.
  virtual Eigen::VectorXd reset(std::uint64_t seed) = 0;
  virtual StepResult step(const Action& action) = 0;
  virtual Eigen::VectorXd observe() const = 0;
  virtual int steps() const = 0;

  /// Flat state (dynamics variables then step counter) for checkpoints.
  virtual std::vector<double> state_vector() const = 0;
  virtual void set_state_vector(const std::vector<double>& state) = 0;
};

/// name in {pendulum, cartpole, chain}.
std::unique_ptr<Environment> make_environment(std::string_view name);

}  // namespace imrl::envs
