#include "imrl/nn/mlp.hpp"

#include "imrl/core/error.hpp"

#include <cmath>

namespace imrl::nn {

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "identity") return Activation::kIdentity;
  throw ConfigError("unknown activation '" + name + "'");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kIdentity: return "identity";
  }
  return "identity";
}

Mlp::Mlp(std::vector<Layer> layers, std::vector<Activation> hidden_activations)
    : layers_(std::move(layers)), hidden_(std::move(hidden_activations)) {
  if (layers_.empty()) throw ShapeError("Mlp: at least one layer required");
  if (hidden_.size() + 1 != layers_.size()) {
    throw ShapeError("Mlp: need one activation per hidden layer");
  }
  check_chain();
}

namespace {
std::vector<Activation> uniform_hidden(std::size_t num_layers, Activation a) {
  return std::vector<Activation>(num_layers == 0 ? 0 : num_layers - 1, a);
}
}  // namespace

Mlp::Mlp(std::vector<Layer> layers, Activation hidden)
    : hidden_(uniform_hidden(layers.size(), hidden)) {
  layers_ = std::move(layers);
  if (layers_.empty()) throw ShapeError("Mlp: at least one layer required");
  check_chain();
}

void Mlp::check_chain() const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    if (l.bias.size() != l.weight.rows()) throw ShapeError("Mlp: bias length != weight rows");
    if (i > 0 && layers_[i - 1].weight.rows() != l.weight.cols()) {
      throw ShapeError("Mlp: layer " + std::to_string(i) + " input width does not chain");
    }
  }
}

Mlp Mlp::init(std::span<const int> widths, Activation hidden, Rng& rng) {
  if (widths.size() < 2) throw ShapeError("Mlp::init: need input and output widths");
  std::vector<Layer> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const int in = widths[i];
    const int out = widths[i + 1];
    if (in < 1 || out < 1) throw ShapeError("Mlp::init: widths must be positive");
    const double bound = std::sqrt(1.0 / in);
    Layer l{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
    for (Eigen::Index c = 0; c < in; ++c)
      for (Eigen::Index r = 0; r < out; ++r) l.weight(r, c) = rng.uniform(-bound, bound);
    for (Eigen::Index r = 0; r < out; ++r) l.bias(r) = rng.uniform(-bound, bound);
    layers.push_back(std::move(l));
  }
  return Mlp(std::move(layers), hidden);
}

int Mlp::input_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols()); }
int Mlp::output_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows()); }

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

Activation Mlp::activation(std::size_t layer) const {
  return layer < hidden_.size() ? hidden_[layer] : Activation::kIdentity;
}

bool Mlp::all_finite() const {
  for (const Layer& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

bool Mlp::same_shape(const Mlp& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].weight.rows() != other.layers_[i].weight.rows() ||
        layers_[i].weight.cols() != other.layers_[i].weight.cols()) {
      return false;
    }
  }
  return true;
}

bool operator==(const Mlp& a, const Mlp& b) {
  if (!a.same_shape(b) || a.hidden_ != b.hidden_) return false;
  for (std::size_t i = 0; i < a.layers_.size(); ++i) {
    if (a.layers_[i].weight != b.layers_[i].weight || a.layers_[i].bias != b.layers_[i].bias) {
      return false;
    }
  }
  return true;
}

void Mlp::save(Archive& ar, const std::string& prefix) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    ar.put(prefix + ".w" + std::to_string(i), layers_[i].weight);
    ar.put(prefix + ".b" + std::to_string(i), Eigen::MatrixXd(layers_[i].bias));
  }
}

void Mlp::load(const Archive& ar, const std::string& prefix) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    ar.read(prefix + ".w" + std::to_string(i), layers_[i].weight);
    ar.read(prefix + ".b" + std::to_string(i), layers_[i].bias);
  }
}

Gradients Gradients::zeros_like(const Mlp& net) {
  Gradients g;
  for (const Layer& l : net.layers()) {
    g.layers.push_back(Layer{Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                             Eigen::VectorXd::Zero(l.bias.size())});
  }
  return g;
}

Gradients& Gradients::operator+=(const Gradients& other) {
  if (layers.size() != other.layers.size()) throw ShapeError("Gradients: layer count mismatch");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += other.layers[i].weight;
    layers[i].bias += other.layers[i].bias;
  }
  return *this;
}

Gradients& Gradients::operator*=(double s) {
  for (Layer& l : layers) {
    l.weight *= s;
    l.bias *= s;
  }
  return *this;
}

bool Gradients::all_finite() const {
  for (const Layer& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

bool Gradients::matches(const Mlp& net) const {
  if (layers.size() != net.layers().size()) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& p = net.layers()[i];
    if (layers[i].weight.rows() != p.weight.rows() || layers[i].weight.cols() != p.weight.cols() ||
        layers[i].bias.size() != p.bias.size()) {
      return false;
    }
  }
  return true;
}

namespace {

void activate(Activation a, Eigen::MatrixXd& z) {
  switch (a) {
    // Eigen's double tanh is scalar; exp is vectorized. Absolute error stays
    // within a few ulp of 1.
    case Activation::kTanh: z = 1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0); break;
    case Activation::kRelu: z = z.cwiseMax(0.0); break;
    case Activation::kIdentity: break;
  }
}

// Multiplies `delta` in place by the activation derivative, expressed through
// the activated output y.
void apply_derivative(Activation a, const Eigen::MatrixXd& y, Eigen::MatrixXd& delta) {
  switch (a) {
    case Activation::kTanh: delta.array() *= 1.0 - y.array().square(); break;
    case Activation::kRelu: delta.array() *= (y.array() > 0.0).cast<double>(); break;
    case Activation::kIdentity: break;
  }
}

}  // namespace

Eigen::MatrixXd forward(const Mlp& net, const Eigen::MatrixXd& batch, ForwardCache* cache) {
  if (net.num_layers() == 0) throw ShapeError("forward: empty network");
  if (batch.rows() != net.input_dim()) {
    throw ShapeError("forward: input has " + std::to_string(batch.rows()) + " rows, network expects " +
                     std::to_string(net.input_dim()));
  }
  if (cache) {
    cache->inputs.clear();
    cache->outputs.clear();
  }
  Eigen::MatrixXd x = batch;
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    const Layer& l = net.layers()[i];
    Eigen::MatrixXd z = l.weight * x;
    z.colwise() += l.bias;
    activate(net.activation(i), z);
    if (cache) {
      cache->inputs.push_back(std::move(x));
      cache->outputs.push_back(z);
    }
    x = std::move(z);
  }
  return x;
}

Eigen::VectorXd forward(const Mlp& net, const Eigen::VectorXd& input) {
  return forward(net, Eigen::MatrixXd(input), nullptr).col(0);
}

BackwardResult backward(const Mlp& net, const ForwardCache& cache, const Eigen::MatrixXd& upstream) {
  if (cache.inputs.size() != net.num_layers()) throw ShapeError("backward: cache does not match network");
  const Eigen::MatrixXd& out = cache.outputs.back();
  if (upstream.rows() != out.rows() || upstream.cols() != out.cols()) {
    throw ShapeError("backward: upstream shape does not match network output");
  }
  BackwardResult result;
  result.grads.layers.resize(net.num_layers());
  Eigen::MatrixXd delta = upstream;
  for (std::size_t i = net.num_layers(); i-- > 0;) {
    const Layer& l = net.layers()[i];
    apply_derivative(net.activation(i), cache.outputs[i], delta);
    Layer& g = result.grads.layers[i];
    g.weight.noalias() = delta * cache.inputs[i].transpose();
    g.bias = delta.rowwise().sum();
    Eigen::MatrixXd next(l.weight.cols(), delta.cols());
    next.noalias() = l.weight.transpose() * delta;
    delta = std::move(next);
  }
  result.input_grad = std::move(delta);
  return result;
}

BackwardResult backward(const Mlp& net, const Eigen::VectorXd& input, const Eigen::VectorXd& upstream) {
  ForwardCache cache;
  forward(net, Eigen::MatrixXd(input), &cache);
  return backward(net, cache, Eigen::MatrixXd(upstream));
}

}  // namespace imrl::nn
