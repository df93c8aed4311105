#include "imrl/imagination/imagination.hpp"

namespace imrl::imagination {
namespace {

std::vector<const agents::Critic*> const_critics(agents::Agent& agent) {
  std::vector<const agents::Critic*> out;
  for (agents::Critic* c : agent.critics()) out.push_back(c);
  return out;
}

}  // namespace

ImaginationAgent::ImaginationAgent(std::unique_ptr<agents::Agent> inner, const replay::ReplayBuffer& buffer,
                                   ImaginationConfig config, const envs::ActionSpace& space, int obs_dim,
                                   double critic_lr, int batch_size, std::uint64_t seed)
    : inner_(std::move(inner)),
      buffer_(buffer),
      config_(std::move(config)),
      pairs_per_step_(static_cast<std::size_t>(config_.pairs_per_step > 0 ? config_.pairs_per_step : batch_size)),
      pair_rng_(Rng::derive(seed, "imagination.pairs")) {
  if (!inner_) throw std::invalid_argument("attach: null agent");
  Rng init = Rng::derive(seed, "init.imagination");
  state_ = ImaginationState::create(config_, obs_dim, space, const_critics(*inner_), config_.lr.value_or(critic_lr),
                                    init);
}

agents::UpdateStats ImaginationAgent::update(const replay::Batch& batch) {
  agents::UpdateStats stats = inner_->update(batch);
  const replay::PairBatch pairs = buffer_.sample_pairs(batch, pairs_per_step_, pair_rng_, config_.cross_episode_only);
  const std::vector<agents::Critic*> critics = inner_->critics();
  double total = 0.0;
  for (std::size_t i = 0; i < critics.size(); ++i) total += im_update(state_, i, *critics[i], pairs, config_);
  stats.im_loss = total / static_cast<double>(critics.size());
  return stats;
}

void ImaginationAgent::save(Archive& ar, const std::string& prefix) const {
  inner_->save(ar, prefix);
  state_.save(ar, prefix + ".im");
  ar.meta()[prefix + ".im"]["pair_rng"] = pair_rng_.state();
}

void ImaginationAgent::load(const Archive& ar, const std::string& prefix) {
  inner_->load(ar, prefix);
  state_.load(ar, prefix + ".im");
  pair_rng_.set_state(ar.meta().at(prefix + ".im").at("pair_rng").get<std::string>());
}

std::unique_ptr<agents::Agent> attach(std::unique_ptr<agents::Agent> agent, const replay::ReplayBuffer& buffer,
                                      const ImaginationConfig& config, const envs::ActionSpace& space, int obs_dim,
                                      double critic_lr, int batch_size, std::uint64_t seed) {
  if (!agent) throw std::invalid_argument("attach: null agent");
  if (agent->critics().empty()) throw std::invalid_argument("attach: agent exposes no critic");
  return std::make_unique<ImaginationAgent>(std::move(agent), buffer, config, space, obs_dim, critic_lr, batch_size,
                                            seed);
}

}  // namespace imrl::imagination
