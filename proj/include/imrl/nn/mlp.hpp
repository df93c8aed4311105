#pragma once

#include "imrl/core/archive.hpp"
#include "imrl/core/rng.hpp"

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

namespace imrl::nn {

enum class Activation { kTanh, kRelu, kIdentity };

Activation parse_activation(const std::string& name);
std::string to_string(Activation a);

struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Parameters of a fully connected network: affine layers with a per-layer
/// hidden activation and an identity output.
class Mlp {
 public:
  Mlp() = default;
  /// hidden_activations.size() must equal layers.size() - 1.
  Mlp(std::vector<Layer> layers, std::vector<Activation> hidden_activations);
  Mlp(std::vector<Layer> layers, Activation hidden);

  /// widths = {in, h1, ..., out}. Weights and biases uniform in
  /// [-sqrt(1/fan_in), sqrt(1/fan_in)].
  static Mlp init(std::span<const int> widths, Activation hidden, Rng& rng);

  int input_dim() const;
  int output_dim() const;
  std::size_t num_layers() const { return layers_.size(); }
  std::size_t parameter_count() const;

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  Activation activation(std::size_t layer) const;

  bool all_finite() const;
  bool same_shape(const Mlp& other) const;

  void save(Archive& ar, const std::string& prefix) const;
  /// Requires this network to already have the stored shape.
  void load(const Archive& ar, const std::string& prefix);

  friend bool operator==(const Mlp& a, const Mlp& b);

 private:
  void check_chain() const;

  std::vector<Layer> layers_;
  std::vector<Activation> hidden_;
};

/// Shape-matched to an Mlp's parameters.
struct Gradients {
  std::vector<Layer> layers;

  static Gradients zeros_like(const Mlp& net);
  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double s);
  bool all_finite() const;
  bool matches(const Mlp& net) const;
};

/// Per-layer inputs and activated outputs kept for the backward pass.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> outputs;
};

/// Batched forward; each column of `batch` is one sample.
Eigen::MatrixXd forward(const Mlp& net, const Eigen::MatrixXd& batch, ForwardCache* cache = nullptr);
Eigen::VectorXd forward(const Mlp& net, const Eigen::VectorXd& input);

struct BackwardResult {
  Gradients grads;            // summed over the batch
  Eigen::MatrixXd input_grad; // in x batch
};

/// Reverse-mode gradients of sum_b <upstream_b, output_b> for the cached pass.
BackwardResult backward(const Mlp& net, const ForwardCache& cache, const Eigen::MatrixXd& upstream);
BackwardResult backward(const Mlp& net, const Eigen::VectorXd& input, const Eigen::VectorXd& upstream);

}  // namespace imrl::nn
