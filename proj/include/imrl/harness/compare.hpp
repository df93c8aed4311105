#pragma once

#include "imrl/harness/config.hpp"
#include "imrl/harness/metrics.hpp"
#include "imrl/harness/trainer.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace imrl::harness {

/// (variant - base) / |base| * 100. With base == 0: 0 when equal, otherwise
/// +-infinity.
double promotion_percent(double base, double variant);

/// Smallest eval step whose mean return reaches `target`; nullopt is the
/// never-reached sentinel.
std::optional<std::int64_t> steps_to_match(const std::vector<EvalRow>& curve, double target);

/// Mean return at the last eval step <= T. Throws std::invalid_argument if
/// the curve has no such point.
double score_at(const std::vector<EvalRow>& curve, std::int64_t T);

/// Pointwise mean over curves sharing one step grid (truncated to the
/// shortest).
std::vector<EvalRow> mean_curve(const std::vector<std::vector<EvalRow>>& curves);

struct SeedResult {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;
  double score = 0.0;
  std::optional<std::int64_t> steps_to_match;  // against the baseline aggregate
  std::vector<EvalRow> curve;
};

struct ArmSummary {
  std::string label;
  std::vector<SeedResult> seeds;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over successful seeds
  int count = 0;     // successful seeds
  int failed = 0;
};

struct ComparisonReport {
  std::string task;
  std::int64_t T = 0;
  ArmSummary base;
  ArmSummary variant;
  double promotion = 0.0;
  std::optional<std::int64_t> steps_to_match;  // variant mean curve vs base mean score
  int warnings = 0;                            // failed runs excluded from aggregates
};

/// Fills mean/std/count/failed from the seed results.
void summarize(ArmSummary& arm);
/// Aggregates two arms whose per-seed scores and curves are already set.
ComparisonReport build_report(std::string task, std::int64_t T, ArmSummary base, ArmSummary variant);

struct CompareOptions {
  RunOptions run;
  unsigned workers = 0;  // 0: hardware concurrency
};

/// Runs both arms for every seed (in parallel across runs), writing each run
/// to out/{base,variant}/seed_<N> when `out` is set, plus report.csv and
/// report.json. Requires at least two seeds.
ComparisonReport compare(const ExperimentConfig& base, const ExperimentConfig& variant,
                         const std::vector<std::uint64_t>& seeds, std::int64_t T,
                         const std::optional<std::filesystem::path>& out = {}, CompareOptions options = {});

std::string report_csv(const ComparisonReport& report);
nlohmann::json report_json(const ComparisonReport& report);

}  // namespace imrl::harness
