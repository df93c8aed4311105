#include "imrl/nn/ops.hpp"

#include "imrl/core/error.hpp"

#include <algorithm>
#include <string>

namespace imrl::nn {

void ema_update(Mlp& target, const Mlp& online, double m) {
  if (!(m >= 0.0 && m <= 1.0)) throw std::invalid_argument("ema_update: momentum outside [0, 1]");
  if (!target.same_shape(online)) throw ShapeError("ema_update: networks are not shape-congruent");
  for (std::size_t i = 0; i < target.num_layers(); ++i) {
    Layer& t = target.layers()[i];
    const Layer& o = online.layers()[i];
    // Clamping to the endpoints keeps the result inside [min, max] despite
    // rounding, which also makes target == online an exact fixed point.
    t.weight = (m * t.weight.array() + (1.0 - m) * o.weight.array())
                   .max(t.weight.array().min(o.weight.array()))
                   .min(t.weight.array().max(o.weight.array()));
    t.bias = (m * t.bias.array() + (1.0 - m) * o.bias.array())
                 .max(t.bias.array().min(o.bias.array()))
                 .min(t.bias.array().max(o.bias.array()));
  }
}

double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != v.size()) {
    throw ShapeError("cosine_similarity: lengths " + std::to_string(u.size()) + " and " +
                     std::to_string(v.size()));
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu < kCosineNormFloor || nv < kCosineNormFloor) return 0.0;
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

}  // namespace imrl::nn
