#pragma once

#include "imrl/nn/mlp.hpp"

#include <Eigen/Core>

namespace imrl::nn {

/// target <- m * target + (1 - m) * online, elementwise. m must lie in [0, 1].
void ema_update(Mlp& target, const Mlp& online, double m);

/// Norms below this are treated as zero vectors by cosine_similarity.
inline constexpr double kCosineNormFloor = 1e-12;

/// <u, v> / (|u| |v|), clamped to [-1, 1]; 0 when either norm is below
/// kCosineNormFloor.
double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace imrl::nn
