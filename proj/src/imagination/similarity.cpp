#include "imrl/core/error.hpp"
#include "imrl/imagination/imagination.hpp"
#include "imrl/nn/ops.hpp"

namespace imrl::imagination {

Similarity parse_similarity(const std::string& name) {
  if (name == "cosine") return Similarity::kCosine;
  if (name == "bilinear") return Similarity::kBilinear;
  throw ConfigError("im.sim must be cosine or bilinear, got '" + name + "'");
}

std::string to_string(Similarity s) { return s == Similarity::kCosine ? "cosine" : "bilinear"; }

Eigen::MatrixXd encoder_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions,
                              const envs::ActionSpace& space) {
  return agents::concat_rows(obs, space.encode(actions));
}

Eigen::VectorXd scn_features(const nn::Mlp& encoder, const Eigen::VectorXd& obs, const envs::Action& action,
                             const envs::ActionSpace& space) {
  return nn::forward(encoder, encoder_input(Eigen::MatrixXd(obs), Eigen::MatrixXd(action), space)).col(0);
}

SimilarityVector similarity_vector(const Eigen::VectorXd& q, const Eigen::VectorXd& q_n, int k, int feature_dim) {
  if (k < 1 || feature_dim < 1) throw ShapeError("similarity_vector: k and feature_dim must be positive");
  if (q.size() != k * feature_dim || q_n.size() != k * feature_dim) {
    throw ShapeError("similarity_vector: features must have length k * feature_dim");
  }
  SimilarityVector v(k);
  for (int i = 0; i < k; ++i) {
    v(i) = nn::cosine_similarity(q.segment(i * feature_dim, feature_dim), q_n.segment(i * feature_dim, feature_dim));
  }
  return v;
}

SimilarityVector bilinear_similarity_vector(const Eigen::VectorXd& q, const Eigen::VectorXd& q_n,
                                            const std::vector<Eigen::MatrixXd>& weights, int feature_dim) {
  const auto k = static_cast<int>(weights.size());
  if (q.size() != k * feature_dim || q_n.size() != k * feature_dim) {
    throw ShapeError("bilinear_similarity_vector: features must have length k * feature_dim");
  }
  SimilarityVector v(k);
  for (int i = 0; i < k; ++i) {
    v(i) = q.segment(i * feature_dim, feature_dim).dot(weights[i] * q_n.segment(i * feature_dim, feature_dim));
  }
  return v;
}

double din_difference(const nn::Mlp& din, const SimilarityVector& v) {
  if (din.output_dim() != 1) throw ShapeError("din_difference: DIN must have a scalar output");
  return nn::forward(din, v)(0);
}

}  // namespace imrl::imagination
