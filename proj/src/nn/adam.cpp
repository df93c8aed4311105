#include "imrl/nn/adam.hpp"

#include "imrl/core/error.hpp"

#include <cmath>

namespace imrl::nn {

AdamState::AdamState(const Mlp& net, AdamConfig config) : config_(config) {
  for (const Layer& l : net.layers()) {
    first_.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
    first_.push_back(Eigen::MatrixXd::Zero(l.bias.size(), 1));
  }
  second_ = first_;
}

AdamState::AdamState(const std::vector<Eigen::MatrixXd>& params, AdamConfig config) : config_(config) {
  for (const Eigen::MatrixXd& p : params) first_.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
  second_ = first_;
}

bool operator==(const AdamState& a, const AdamState& b) {
  return a.step_ == b.step_ && a.first_ == b.first_ && a.second_ == b.second_ &&
         a.config_.lr == b.config_.lr && a.config_.beta1 == b.config_.beta1 &&
         a.config_.beta2 == b.config_.beta2 && a.config_.eps == b.config_.eps;
}

void AdamState::save(Archive& ar, const std::string& prefix) const {
  ar.put_scalar(prefix + ".t", static_cast<double>(step_));
  for (std::size_t i = 0; i < first_.size(); ++i) {
    ar.put(prefix + ".m" + std::to_string(i), first_[i]);
    ar.put(prefix + ".v" + std::to_string(i), second_[i]);
  }
}

void AdamState::load(const Archive& ar, const std::string& prefix) {
  step_ = static_cast<std::int64_t>(ar.scalar(prefix + ".t"));
  for (std::size_t i = 0; i < first_.size(); ++i) {
    ar.read(prefix + ".m" + std::to_string(i), first_[i]);
    ar.read(prefix + ".v" + std::to_string(i), second_[i]);
  }
}

void adam_step(AdamState& state, std::vector<Eigen::Map<Eigen::MatrixXd>>& params,
               const std::vector<Eigen::Map<const Eigen::MatrixXd>>& grads) {
  if (params.size() != state.first_.size() || grads.size() != params.size()) {
    throw ShapeError("adam_step: parameter/gradient/state count mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].rows() != state.first_[i].rows() || params[i].cols() != state.first_[i].cols() ||
        grads[i].rows() != params[i].rows() || grads[i].cols() != params[i].cols()) {
      throw ShapeError("adam_step: array " + std::to_string(i) + " shape mismatch");
    }
    if (!grads[i].allFinite()) {
      throw NonFiniteError("adam_step: non-finite gradient in array " + std::to_string(i));
    }
  }
  const AdamConfig& c = state.config_;
  state.step_ += 1;
  const double t = static_cast<double>(state.step_);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto m = state.first_[i].array();
    auto v = state.second_[i].array();
    const auto g = grads[i].array();
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.square();
    params[i].array() -= c.lr * (m / correction1) / ((v / correction2).sqrt() + c.eps);
  }
}

void adam_step(AdamState& state, Mlp& params, const Gradients& grads) {
  if (!grads.matches(params)) throw ShapeError("adam_step: gradients do not match parameters");
  std::vector<Eigen::Map<Eigen::MatrixXd>> p;
  std::vector<Eigen::Map<const Eigen::MatrixXd>> g;
  for (std::size_t i = 0; i < params.num_layers(); ++i) {
    Layer& l = params.layers()[i];
    const Layer& d = grads.layers[i];
    p.emplace_back(l.weight.data(), l.weight.rows(), l.weight.cols());
    p.emplace_back(l.bias.data(), l.bias.size(), 1);
    g.emplace_back(d.weight.data(), d.weight.rows(), d.weight.cols());
    g.emplace_back(d.bias.data(), d.bias.size(), 1);
  }
  adam_step(state, p, g);
}

void adam_step(AdamState& state, std::vector<Eigen::MatrixXd>& params,
               const std::vector<Eigen::MatrixXd>& grads) {
  std::vector<Eigen::Map<Eigen::MatrixXd>> p;
  std::vector<Eigen::Map<const Eigen::MatrixXd>> g;
  for (auto& x : params) p.emplace_back(x.data(), x.rows(), x.cols());
  for (const auto& x : grads) g.emplace_back(x.data(), x.rows(), x.cols());
  adam_step(state, p, g);
}

}  // namespace imrl::nn
