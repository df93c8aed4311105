#pragma once

#include "imrl/core/archive.hpp"
#include "imrl/core/rng.hpp"
#include "imrl/envs/environment.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace imrl::replay {

struct Transition {
  Eigen::VectorXd obs;
  envs::Action action;
  double reward = 0.0;
  Eigen::VectorXd next_obs;
  bool done = false;
  bool truncated = false;
  std::int64_t episode = 0;
};

/// Column-stacked minibatch; column b is the transition at storage slot
/// indices[b].
struct Batch {
  std::vector<std::size_t> indices;
  Eigen::MatrixXd obs;       // obs_dim x B
  Eigen::MatrixXd actions;   // action storage dim x B
  Eigen::VectorXd rewards;   // B
  Eigen::MatrixXd next_obs;  // obs_dim x B
  Eigen::VectorXd done;      // 1.0 where terminal
  Eigen::VectorXd truncated;

  std::size_t size() const { return indices.size(); }
};

/// Element b of `first` is paired with element b of `second`.
struct PairBatch {
  Batch first;
  Batch second;
};

/// Fixed-capacity ring of transitions with uniform sampling.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int obs_dim, int action_dim);

  /// Throws ShapeError on a dimension mismatch, NonFiniteError on NaN/Inf.
  void push(const Transition& t);

  std::size_t size() const { return count_; }
  std::size_t capacity() const { return capacity_; }
  int obs_dim() const { return obs_dim_; }
  int action_dim() const { return action_dim_; }
  std::uint64_t total_pushed() const { return pushed_; }

  /// Storage slot access; slot < size().
  Transition at(std::size_t slot) const;

  /// n independent uniform slots, with replacement. Throws on an empty buffer.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;
  Batch sample_batch(std::size_t n, Rng& rng) const;
  Batch gather(const std::vector<std::size_t>& slots) const;

  /// n pairs: the first element cycles through `anchors` (the current TD
  /// minibatch), the second is a uniform draw over the whole buffer. With
  /// cross_episode_only, second draws from the anchor's own episode are
  /// redrawn (bounded retries, then accepted).
  PairBatch sample_pairs(const Batch& anchors, std::size_t n, Rng& rng,
                         bool cross_episode_only = false) const;

  void save(Archive& ar, const std::string& prefix) const;
  void load(const Archive& ar, const std::string& prefix);

 private:
  std::size_t capacity_;
  int obs_dim_;
  int action_dim_;
  std::size_t count_ = 0;
  std::size_t cursor_ = 0;
  std::uint64_t pushed_ = 0;

  Eigen::MatrixXd obs_;
  Eigen::MatrixXd actions_;
  Eigen::VectorXd rewards_;
  Eigen::MatrixXd next_obs_;
  Eigen::VectorXd done_;
  Eigen::VectorXd truncated_;
  std::vector<std::int64_t> episode_;
};

}  // namespace imrl::replay
