#pragma once

#include "imrl/agents/agent.hpp"
#include "imrl/imagination/imagination.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace imrl::harness {

struct EnvConfig {
  std::string name = "pendulum";
};

struct BufferConfig {
  std::size_t capacity = 100000;
};

struct TrainConfig {
  std::int64_t total_steps = 20000;
  std::int64_t warmup_steps = 1000;
  std::int64_t eval_every = 1000;
  int eval_episodes = 5;
};

/// Full declarative description of one run.
struct ExperimentConfig {
  EnvConfig env;
  agents::AgentConfig algo;
  imagination::ImaginationConfig im;
  BufferConfig buffer;
  TrainConfig train;
  std::uint64_t seed = 0;

  /// Throws ConfigError.
  void validate() const;
};

/// Nested JSON object ({"algo": {"gamma": 0.99}, ...}); unknown keys and
/// wrongly typed values throw ConfigError. Missing keys keep their defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& c);

}  // namespace imrl::harness
