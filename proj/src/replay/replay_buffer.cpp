#include "imrl/replay/replay_buffer.hpp"

#include "imrl/core/error.hpp"

#include <cmath>

namespace imrl::replay {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int obs_dim, int action_dim)
    : capacity_(capacity), obs_dim_(obs_dim), action_dim_(action_dim) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  if (obs_dim < 1 || action_dim < 1) throw ShapeError("ReplayBuffer: dimensions must be positive");
  const auto cap = static_cast<Eigen::Index>(capacity);
  obs_.setZero(obs_dim, cap);
  actions_.setZero(action_dim, cap);
  rewards_.setZero(cap);
  next_obs_.setZero(obs_dim, cap);
  done_.setZero(cap);
  truncated_.setZero(cap);
  episode_.assign(capacity, 0);
}

void ReplayBuffer::push(const Transition& t) {
  if (t.obs.size() != obs_dim_ || t.next_obs.size() != obs_dim_) {
    throw ShapeError("ReplayBuffer::push: observation width " + std::to_string(t.obs.size()) +
                     ", expected " + std::to_string(obs_dim_));
  }
  if (t.action.size() != action_dim_) {
    throw ShapeError("ReplayBuffer::push: action width " + std::to_string(t.action.size()) +
                     ", expected " + std::to_string(action_dim_));
  }
  if (!t.obs.allFinite() || !t.next_obs.allFinite() || !t.action.allFinite() || !std::isfinite(t.reward)) {
    throw NonFiniteError("ReplayBuffer::push: non-finite transition");
  }
  const auto c = static_cast<Eigen::Index>(cursor_);
  obs_.col(c) = t.obs;
  actions_.col(c) = t.action;
  rewards_(c) = t.reward;
  next_obs_.col(c) = t.next_obs;
  done_(c) = t.done ? 1.0 : 0.0;
  truncated_(c) = t.truncated ? 1.0 : 0.0;
  episode_[cursor_] = t.episode;
  cursor_ = (cursor_ + 1) % capacity_;
  if (count_ < capacity_) ++count_;
  ++pushed_;
}

Transition ReplayBuffer::at(std::size_t slot) const {
  if (slot >= count_) throw std::out_of_range("ReplayBuffer::at: slot never written");
  const auto c = static_cast<Eigen::Index>(slot);
  Transition t;
  t.obs = obs_.col(c);
  t.action = actions_.col(c);
  t.reward = rewards_(c);
  t.next_obs = next_obs_.col(c);
  t.done = done_(c) != 0.0;
  t.truncated = truncated_(c) != 0.0;
  t.episode = episode_[slot];
  return t;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  if (count_ == 0) throw std::logic_error("ReplayBuffer: cannot sample from an empty buffer");
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = rng.uniform_index(count_);
  return out;
}

Batch ReplayBuffer::gather(const std::vector<std::size_t>& slots) const {
  const auto n = static_cast<Eigen::Index>(slots.size());
  Batch b;
  b.indices = slots;
  b.obs.resize(obs_dim_, n);
  b.actions.resize(action_dim_, n);
  b.rewards.resize(n);
  b.next_obs.resize(obs_dim_, n);
  b.done.resize(n);
  b.truncated.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::size_t slot = slots[static_cast<std::size_t>(j)];
    if (slot >= count_) throw std::out_of_range("ReplayBuffer::gather: slot never written");
    const auto c = static_cast<Eigen::Index>(slot);
    b.obs.col(j) = obs_.col(c);
    b.actions.col(j) = actions_.col(c);
    b.rewards(j) = rewards_(c);
    b.next_obs.col(j) = next_obs_.col(c);
    b.done(j) = done_(c);
    b.truncated(j) = truncated_(c);
  }
  return b;
}

Batch ReplayBuffer::sample_batch(std::size_t n, Rng& rng) const { return gather(sample_indices(n, rng)); }

PairBatch ReplayBuffer::sample_pairs(const Batch& anchors, std::size_t n, Rng& rng,
                                     bool cross_episode_only) const {
  if (count_ == 0) throw std::logic_error("ReplayBuffer: cannot sample from an empty buffer");
  if (anchors.size() == 0) throw std::invalid_argument("ReplayBuffer::sample_pairs: empty anchor batch");
  constexpr int kMaxRedraws = 16;
  std::vector<std::size_t> first(n);
  std::vector<std::size_t> second(n);
  for (std::size_t i = 0; i < n; ++i) {
    first[i] = anchors.indices[i % anchors.size()];
    std::size_t partner = rng.uniform_index(count_);
    if (cross_episode_only) {
      for (int tries = 0; tries < kMaxRedraws && episode_[partner] == episode_[first[i]]; ++tries) {
        partner = rng.uniform_index(count_);
      }
    }
    second[i] = partner;
  }
  return PairBatch{gather(first), gather(second)};
}

void ReplayBuffer::save(Archive& ar, const std::string& prefix) const {
  auto& m = ar.meta()[prefix];
  m["capacity"] = capacity_;
  m["count"] = count_;
  m["cursor"] = cursor_;
  m["pushed"] = pushed_;
  const auto n = static_cast<Eigen::Index>(count_);
  ar.put(prefix + ".obs", Eigen::MatrixXd(obs_.leftCols(n)));
  ar.put(prefix + ".actions", Eigen::MatrixXd(actions_.leftCols(n)));
  ar.put(prefix + ".rewards", Eigen::MatrixXd(rewards_.head(n)));
  ar.put(prefix + ".next_obs", Eigen::MatrixXd(next_obs_.leftCols(n)));
  ar.put(prefix + ".done", Eigen::MatrixXd(done_.head(n)));
  ar.put(prefix + ".truncated", Eigen::MatrixXd(truncated_.head(n)));
  ar.put(prefix + ".episode", std::vector<double>(episode_.begin(), episode_.begin() + n));
}

void ReplayBuffer::load(const Archive& ar, const std::string& prefix) {
  const auto& m = ar.meta().at(prefix);
  if (m.at("capacity").get<std::size_t>() != capacity_) {
    throw CheckpointError("ReplayBuffer::load: capacity mismatch");
  }
  const auto count = m.at("count").get<std::size_t>();
  const auto n = static_cast<Eigen::Index>(count);
  if (count > capacity_) throw CheckpointError("ReplayBuffer::load: count exceeds capacity");
  auto fetch = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd x = ar.matrix(prefix + name);
    if (x.rows() != rows || x.cols() != cols) {
      throw CheckpointError("ReplayBuffer::load: bad shape for " + name);
    }
    return x;
  };
  obs_.leftCols(n) = fetch(".obs", obs_dim_, n);
  actions_.leftCols(n) = fetch(".actions", action_dim_, n);
  rewards_.head(n) = fetch(".rewards", n, 1).col(0);
  next_obs_.leftCols(n) = fetch(".next_obs", obs_dim_, n);
  done_.head(n) = fetch(".done", n, 1).col(0);
  truncated_.head(n) = fetch(".truncated", n, 1).col(0);
  const std::vector<double> ep = ar.vector(prefix + ".episode");
  if (ep.size() != count) throw CheckpointError("ReplayBuffer::load: bad episode array");
  for (std::size_t i = 0; i < count; ++i) episode_[i] = static_cast<std::int64_t>(ep[i]);
  count_ = count;
  cursor_ = m.at("cursor").get<std::size_t>();
  pushed_ = m.at("pushed").get<std::uint64_t>();
}

}  // namespace imrl::replay
