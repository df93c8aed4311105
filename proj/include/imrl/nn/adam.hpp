#pragma once

#include "imrl/core/archive.hpp"
#include "imrl/nn/mlp.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace imrl::nn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment estimates for a parameter list, in the flattened order
/// w0, b0, w1, b1, ... for an Mlp.
class AdamState {
 public:
  AdamState() = default;
  AdamState(const Mlp& net, AdamConfig config);
  AdamState(const std::vector<Eigen::MatrixXd>& params, AdamConfig config);

  const AdamConfig& config() const { return config_; }
  std::int64_t step() const { return step_; }
  const std::vector<Eigen::MatrixXd>& first_moments() const { return first_; }
  const std::vector<Eigen::MatrixXd>& second_moments() const { return second_; }

  void save(Archive& ar, const std::string& prefix) const;
  void load(const Archive& ar, const std::string& prefix);

  friend bool operator==(const AdamState& a, const AdamState& b);

 private:
  friend void adam_step(AdamState&, std::vector<Eigen::Map<Eigen::MatrixXd>>&,
                        const std::vector<Eigen::Map<const Eigen::MatrixXd>>&);

  AdamConfig config_;
  std::int64_t step_ = 0;
  std::vector<Eigen::MatrixXd> first_;
  std::vector<Eigen::MatrixXd> second_;
};

/// One bias-corrected Adam step. Rejects non-finite gradients (throws
/// NonFiniteError) before touching the parameters or the state.
void adam_step(AdamState& state, Mlp& params, const Gradients& grads);
void adam_step(AdamState& state, std::vector<Eigen::MatrixXd>& params,
               const std::vector<Eigen::MatrixXd>& grads);
void adam_step(AdamState& state, std::vector<Eigen::Map<Eigen::MatrixXd>>& params,
               const std::vector<Eigen::Map<const Eigen::MatrixXd>>& grads);

}  // namespace imrl::nn
