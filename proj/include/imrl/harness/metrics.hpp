#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace imrl::harness {

struct TrainRow {
  std::int64_t step = 0;
  std::int64_t episode = 0;     // completed episodes so far
  double episode_return = 0.0;  // return of the last completed episode (0 before the first)
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double im_loss = 0.0;
  double wall_ms = 0.0;
};

struct EvalRow {
  std::int64_t step = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
};

struct RunMetrics {
  std::vector<TrainRow> train;
  std::vector<EvalRow> eval;
  bool failed = false;
  std::string failure;
};

inline constexpr const char* kTrainCsvHeader = "step,episode,episode_return,critic_loss,actor_loss,im_loss,wall_ms";
inline constexpr const char* kEvalCsvHeader = "step,mean_return,std_return";

/// Shortest round-trip decimal representation.
std::string format_real(double v);

std::string train_csv(const std::vector<TrainRow>& rows);
std::string eval_csv(const std::vector<EvalRow>& rows);
std::vector<EvalRow> parse_eval_csv(const std::string& text);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace imrl::harness
