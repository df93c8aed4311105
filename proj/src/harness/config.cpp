#include "imrl/harness/config.hpp"

#include "imrl/core/error.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace imrl::harness {
namespace {

using nlohmann::json;
using Setter = std::function<void(const json&)>;

template <typename T>
Setter bind(T& field) {
  return [&field](const json& v) { field = v.get<T>(); };
}

Setter bind_optional(std::optional<double>& field) {
  return [&field](const json& v) {
    if (v.is_null()) {
      field.reset();
    } else {
      field = v.get<double>();
    }
  };
}

void apply_section(const json& section, const std::string& name, const std::map<std::string, Setter>& setters) {
  if (!section.is_object()) throw ConfigError("config section '" + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + name + "." + key + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + name + "." + key + "' has the wrong type: " + e.what());
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (env.name != "pendulum" && env.name != "cartpole" && env.name != "chain") {
    throw ConfigError("env.name must be pendulum, cartpole or chain");
  }
  algo.validate();
  im.validate();
  if (buffer.capacity < 1) throw ConfigError("buffer.capacity must be positive");
  if (train.eval_every < 1) throw ConfigError("train.eval_every must be >= 1");
  if (train.total_steps < 0) throw ConfigError("train.total_steps must be >= 0");
  if (train.total_steps != 0 && train.total_steps < train.eval_every) {
    throw ConfigError("train.total_steps must be >= train.eval_every (or 0)");
  }
  if (train.warmup_steps < 0) throw ConfigError("train.warmup_steps must be >= 0");
  if (train.eval_episodes < 1) throw ConfigError("train.eval_episodes must be >= 1");
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  std::string activation = nn::to_string(c.algo.activation);
  std::string sim = imagination::to_string(c.im.sim);

  const std::map<std::string, std::map<std::string, Setter>> sections{
      {"env", {{"name", bind(c.env.name)}}},
      {"algo",
       {{"name", bind(c.algo.name)},
        {"gamma", bind(c.algo.gamma)},
        {"lr_actor", bind(c.algo.lr_actor)},
        {"lr_critic", bind(c.algo.lr_critic)},
        {"batch_size", bind(c.algo.batch_size)},
        {"target_update_period", bind(c.algo.target_update_period)},
        {"polyak", bind(c.algo.polyak)},
        {"alpha", bind(c.algo.alpha)},
        {"epsilon_start", bind(c.algo.epsilon_start)},
        {"epsilon_end", bind(c.algo.epsilon_end)},
        {"epsilon_decay_steps", bind(c.algo.epsilon_decay_steps)},
        {"exploration_noise", bind(c.algo.exploration_noise)},
        {"hidden", bind(c.algo.hidden)},
        {"activation", bind(activation)}}},
      {"im",
       {{"enabled", bind(c.im.enabled)},
        {"k", bind(c.im.k)},
        {"feature_dim", bind(c.im.feature_dim)},
        {"momentum", bind(c.im.momentum)},
        {"loss_weight", bind(c.im.loss_weight)},
        {"pairs_per_step", bind(c.im.pairs_per_step)},
        {"detach_target_critic", bind(c.im.detach_target_critic)},
        {"sim", bind(sim)},
        {"lr", bind_optional(c.im.lr)},
        {"cross_episode_only", bind(c.im.cross_episode_only)},
        {"encoder_hidden", bind(c.im.encoder_hidden)},
        {"din_hidden", bind(c.im.din_hidden)}}},
      {"buffer", {{"capacity", bind(c.buffer.capacity)}}},
      {"train",
       {{"total_steps", bind(c.train.total_steps)},
        {"warmup_steps", bind(c.train.warmup_steps)},
        {"eval_every", bind(c.train.eval_every)},
        {"eval_episodes", bind(c.train.eval_episodes)}}},
  };

  for (const auto& [key, value] : j.items()) {
    if (key == "seed") {
      if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
        throw ConfigError("seed must be a non-negative integer");
      }
      c.seed = value.get<std::uint64_t>();
      continue;
    }
    auto it = sections.find(key);
    if (it == sections.end()) throw ConfigError("unknown config key '" + key + "'");
    apply_section(value, key, it->second);
  }
  c.algo.activation = nn::parse_activation(activation);
  c.im.sim = imagination::parse_similarity(sim);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["env"] = {{"name", c.env.name}};
  j["algo"] = {{"name", c.algo.name},
               {"gamma", c.algo.gamma},
               {"lr_actor", c.algo.lr_actor},
               {"lr_critic", c.algo.lr_critic},
               {"batch_size", c.algo.batch_size},
               {"target_update_period", c.algo.target_update_period},
               {"polyak", c.algo.polyak},
               {"alpha", c.algo.alpha},
               {"epsilon_start", c.algo.epsilon_start},
               {"epsilon_end", c.algo.epsilon_end},
               {"epsilon_decay_steps", c.algo.epsilon_decay_steps},
               {"exploration_noise", c.algo.exploration_noise},
               {"hidden", c.algo.hidden},
               {"activation", nn::to_string(c.algo.activation)}};
  j["im"] = {{"enabled", c.im.enabled},
             {"k", c.im.k},
             {"feature_dim", c.im.feature_dim},
             {"momentum", c.im.momentum},
             {"loss_weight", c.im.loss_weight},
             {"pairs_per_step", c.im.pairs_per_step},
             {"detach_target_critic", c.im.detach_target_critic},
             {"sim", imagination::to_string(c.im.sim)},
             {"lr", c.im.lr ? json(*c.im.lr) : json(nullptr)},
             {"cross_episode_only", c.im.cross_episode_only},
             {"encoder_hidden", c.im.encoder_hidden},
             {"din_hidden", c.im.din_hidden}};
  j["buffer"] = {{"capacity", c.buffer.capacity}};
  j["train"] = {{"total_steps", c.train.total_steps},
                {"warmup_steps", c.train.warmup_steps},
                {"eval_every", c.train.eval_every},
                {"eval_episodes", c.train.eval_episodes}};
  j["seed"] = c.seed;
  return j;
}

}  // namespace imrl::harness
