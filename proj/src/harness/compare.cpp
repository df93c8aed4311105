#include "imrl/harness/compare.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace imrl::harness {

double promotion_percent(double base, double variant) {
  if (base == 0.0) {
    if (variant == base) return 0.0;
    return variant > base ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  }
  return (variant - base) / std::abs(base) * 100.0;
}

std::optional<std::int64_t> steps_to_match(const std::vector<EvalRow>& curve, double target) {
  for (const EvalRow& r : curve) {
    if (r.mean_return >= target) return r.step;
  }
  return std::nullopt;
}

double score_at(const std::vector<EvalRow>& curve, std::int64_t T) {
  const EvalRow* found = nullptr;
  for (const EvalRow& r : curve) {
    if (r.step <= T && (found == nullptr || r.step >= found->step)) found = &r;
  }
  if (found == nullptr) throw std::invalid_argument("score_at: no eval point at or before step " + std::to_string(T));
  return found->mean_return;
}

std::vector<EvalRow> mean_curve(const std::vector<std::vector<EvalRow>>& curves) {
  if (curves.empty()) return {};
  std::size_t len = curves.front().size();
  for (const auto& c : curves) len = std::min(len, c.size());
  std::vector<EvalRow> out(len);
  for (std::size_t i = 0; i < len; ++i) {
    out[i].step = curves.front()[i].step;
    double sum = 0.0;
    for (const auto& c : curves) {
      if (c[i].step != out[i].step) throw std::invalid_argument("mean_curve: eval grids differ");
      sum += c[i].mean_return;
    }
    out[i].mean_return = sum / static_cast<double>(curves.size());
    double var = 0.0;
    if (curves.size() > 1) {
      for (const auto& c : curves) var += (c[i].mean_return - out[i].mean_return) * (c[i].mean_return - out[i].mean_return);
      var /= static_cast<double>(curves.size() - 1);
    }
    out[i].std_return = std::sqrt(var);
  }
  return out;
}

void summarize(ArmSummary& arm) {
  std::vector<double> scores;
  arm.failed = 0;
  for (const SeedResult& s : arm.seeds) {
    if (s.failed) {
      ++arm.failed;
    } else {
      scores.push_back(s.score);
    }
  }
  arm.count = static_cast<int>(scores.size());
  arm.mean = 0.0;
  arm.std = 0.0;
  if (scores.empty()) return;
  for (double s : scores) arm.mean += s;
  arm.mean /= static_cast<double>(scores.size());
  if (scores.size() > 1) {
    double var = 0.0;
    for (double s : scores) var += (s - arm.mean) * (s - arm.mean);
    arm.std = std::sqrt(var / static_cast<double>(scores.size() - 1));
  }
}

namespace {

std::vector<EvalRow> arm_curve(const ArmSummary& arm) {
  std::vector<std::vector<EvalRow>> curves;
  for (const SeedResult& s : arm.seeds) {
    if (!s.failed) curves.push_back(s.curve);
  }
  return mean_curve(curves);
}

nlohmann::json steps_json(const std::optional<std::int64_t>& s) {
  return s ? nlohmann::json(*s) : nlohmann::json("inf");
}

std::string steps_csv(const std::optional<std::int64_t>& s) { return s ? std::to_string(*s) : "inf"; }

nlohmann::json real_json(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

nlohmann::json arm_json(const ArmSummary& arm) {
  nlohmann::json seeds = nlohmann::json::array();
  for (const SeedResult& s : arm.seeds) {
    nlohmann::json j = {{"seed", s.seed}, {"failed", s.failed}};
    if (s.failed) {
      j["failure"] = s.failure;
    } else {
      j["score"] = s.score;
      j["steps_to_match"] = steps_json(s.steps_to_match);
    }
    seeds.push_back(j);
  }
  return {{"label", arm.label}, {"mean", arm.mean}, {"std", arm.std}, {"count", arm.count},
          {"failed", arm.failed}, {"seeds", seeds}};
}

}  // namespace

ComparisonReport build_report(std::string task, std::int64_t T, ArmSummary base, ArmSummary variant) {
  summarize(base);
  summarize(variant);
  ComparisonReport r;
  r.task = std::move(task);
  r.T = T;
  r.warnings = base.failed + variant.failed;
  if (base.count > 0) {
    for (SeedResult& s : variant.seeds) {
      if (!s.failed) s.steps_to_match = steps_to_match(s.curve, base.mean);
    }
    for (SeedResult& s : base.seeds) {
      if (!s.failed) s.steps_to_match = steps_to_match(s.curve, base.mean);
    }
  }
  if (base.count > 0 && variant.count > 0) {
    r.promotion = promotion_percent(base.mean, variant.mean);
    r.steps_to_match = steps_to_match(arm_curve(variant), base.mean);
  } else {
    r.promotion = std::numeric_limits<double>::quiet_NaN();
  }
  r.base = std::move(base);
  r.variant = std::move(variant);
  return r;
}

ComparisonReport compare(const ExperimentConfig& base, const ExperimentConfig& variant,
                         const std::vector<std::uint64_t>& seeds, std::int64_t T,
                         const std::optional<std::filesystem::path>& out, CompareOptions options) {
  if (seeds.size() < 2) throw std::invalid_argument("compare: at least two seeds are required");
  if (T < 0) throw std::invalid_argument("compare: T must be non-negative");
  base.validate();
  variant.validate();

  struct Job {
    const ExperimentConfig* config;
    std::string arm;
    std::size_t index;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    jobs.push_back({&base, "base", i});
    jobs.push_back({&variant, "variant", i});
  }
  ArmSummary base_arm;
  ArmSummary variant_arm;
  base_arm.label = "base";
  variant_arm.label = "variant";
  base_arm.seeds.resize(seeds.size());
  variant_arm.seeds.resize(seeds.size());

  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  RunOptions run_options = options.run;
  if (run_options.progress) {
    auto inner = run_options.progress;
    run_options.progress = [inner, &progress_mutex](const std::string& line) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      inner(line);
    };
  }
  auto worker = [&]() {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      ExperimentConfig cfg = *job.config;
      cfg.seed = seeds[job.index];
      SeedResult& result = (job.arm == "base" ? base_arm : variant_arm).seeds[job.index];
      result.seed = cfg.seed;
      RunOptions opts = run_options;
      if (opts.progress) {
        auto inner = opts.progress;
        const std::string tag = job.arm + " seed " + std::to_string(cfg.seed) + ": ";
        opts.progress = [inner, tag](const std::string& line) { inner(tag + line); };
      }
      try {
        std::optional<std::filesystem::path> dir;
        if (out) dir = *out / job.arm / ("seed_" + std::to_string(cfg.seed));
        const RunMetrics m = run_training(cfg, dir, opts);
        result.curve = m.eval;
        result.failed = m.failed;
        result.failure = m.failure;
        if (!m.failed) result.score = score_at(m.eval, T);
      } catch (const std::exception& e) {
        result.failed = true;
        result.failure = e.what();
      }
    }
  };
  unsigned n = options.workers != 0 ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(jobs.size()));
  std::vector<std::thread> threads;
  for (unsigned i = 1; i < n; ++i) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();

  ComparisonReport report =
      build_report(base.env.name + "/" + base.algo.name, T, std::move(base_arm), std::move(variant_arm));
  if (out) {
    std::filesystem::create_directories(*out);
    write_text(*out / "report.csv", report_csv(report));
    write_text(*out / "report.json", report_json(report).dump(2) + "\n");
  }
  return report;
}

std::string report_csv(const ComparisonReport& r) {
  std::string s = "arm,seed,score,std,steps_to_match,status\n";
  for (const ArmSummary* arm : {&r.base, &r.variant}) {
    for (const SeedResult& seed : arm->seeds) {
      s += arm->label + "," + std::to_string(seed.seed) + ",";
      if (seed.failed) {
        s += ",,,failed\n";
      } else {
        s += format_real(seed.score) + ",," + steps_csv(seed.steps_to_match) + ",ok\n";
      }
    }
  }
  s += "base,aggregate," + format_real(r.base.mean) + "," + format_real(r.base.std) + ",," +
       std::to_string(r.base.count) + "_ok\n";
  s += "variant,aggregate," + format_real(r.variant.mean) + "," + format_real(r.variant.std) + "," +
       steps_csv(r.steps_to_match) + "," + std::to_string(r.variant.count) + "_ok\n";
  return s;
}

nlohmann::json report_json(const ComparisonReport& r) {
  nlohmann::json j = {{"task", r.task},
                      {"T", r.T},
                      {"base", arm_json(r.base)},
                      {"variant", arm_json(r.variant)},
                      {"promotion_percent", std::isnan(r.promotion) ? nlohmann::json(nullptr) : real_json(r.promotion)},
                      {"steps_to_match", steps_json(r.steps_to_match)},
                      {"warnings", r.warnings}};
  j["steps_to_match_ratio"] =
      r.steps_to_match && r.T > 0 ? nlohmann::json(static_cast<double>(*r.steps_to_match) / static_cast<double>(r.T))
                                  : nlohmann::json("inf");
  return j;
}

}  // namespace imrl::harness
