// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only name[,name...]] [--list]

#include "imrl/agents/dqn.hpp"
#include "imrl/core/allocator.hpp"
#include "imrl/envs/pendulum.hpp"
#include "imrl/harness/checkpoint.hpp"
#include "imrl/harness/compare.hpp"
#include "imrl/harness/config.hpp"
#include "imrl/harness/metrics.hpp"
#include "imrl/harness/trainer.hpp"
#include "imrl/imagination/imagination.hpp"
#include "imrl/nn/mlp.hpp"
#include "imrl/nn/ops.hpp"
#include "support/flat.hpp"
#include "support/im_transcription.hpp"
#include "support/oracles.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace imrl;
using namespace imrl::harness;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig config(const std::string& file, std::uint64_t seed) {
  ExperimentConfig c = load_config(fs::path(IMRL_CONFIG_DIR) / file);
  c.seed = seed;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("imrl_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Drops one CSV column by index on every line.
std::string drop_column(const std::string& csv, std::size_t column) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (column < cells.size()) cells.erase(cells.begin() + static_cast<std::ptrdiff_t>(column));
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

void unflatten(nn::Mlp& net, const std::vector<double>& flat) {
  std::size_t k = 0;
  for (nn::Layer& l : net.layers()) {
    for (Eigen::Index o = 0; o < l.weight.rows(); ++o)
      for (Eigen::Index i = 0; i < l.weight.cols(); ++i) l.weight(o, i) = flat[k++];
    for (Eigen::Index o = 0; o < l.bias.size(); ++o) l.bias(o) = flat[k++];
  }
}

std::vector<double> grad_flat(const nn::Gradients& g) {
  std::vector<double> out;
  for (const nn::Layer& l : g.layers) {
    for (Eigen::Index o = 0; o < l.weight.rows(); ++o)
      for (Eigen::Index i = 0; i < l.weight.cols(); ++i) out.push_back(l.weight(o, i));
    for (Eigen::Index o = 0; o < l.bias.size(); ++o) out.push_back(l.bias(o));
  }
  return out;
}

Outcome gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(77);
  int nets = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 150; ++trial) {
    const int in = 1 + static_cast<int>(rng.uniform_index(4));
    std::vector<int> widths{in};
    const int depth = 1 + static_cast<int>(rng.uniform_index(3));
    for (int d = 0; d < depth; ++d) widths.push_back(1 + static_cast<int>(rng.uniform_index(6)));
    widths.push_back(1 + static_cast<int>(rng.uniform_index(3)));
    const nn::Activation act = trial % 3 == 2 ? nn::Activation::kRelu : nn::Activation::kTanh;
    const nn::Mlp net = nn::Mlp::init(widths, act, rng);
    const int batch = 1 + static_cast<int>(rng.uniform_index(4));
    Eigen::MatrixXd x(in, batch), up(net.output_dim(), batch);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.5, 1.5);
    for (Eigen::Index i = 0; i < up.size(); ++i) up.data()[i] = rng.uniform(-1, 1);

    auto objective = [&](const std::vector<double>& p) {
      nn::Mlp copy = net;
      unflatten(copy, p);
      return (nn::forward(copy, x).array() * up.array()).sum();
    };
    const std::vector<double> p = testing::to_flat(net);
    nn::ForwardCache cache;
    nn::forward(net, x, &cache);
    // ReLU kinks make central differences meaningless within h of zero.
    if (act == nn::Activation::kRelu) {
      bool near_kink = false;
      for (std::size_t l = 0; l + 1 < net.num_layers(); ++l) {
        const nn::Layer& layer = net.layers()[l];
        const Eigen::MatrixXd z = (layer.weight * cache.inputs[l]).colwise() + layer.bias;
        near_kink = near_kink || (z.array().abs() < 1e-3).any();
      }
      if (near_kink) continue;
    }
    const std::vector<double> numeric = testing::central_differences(objective, p, 1e-5);
    const std::vector<double> analytic = grad_flat(nn::backward(net, cache, up).grads);
    double err = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-2});
      err = std::max(err, std::abs(analytic[i] - numeric[i]) / scale);
    }
    worst = std::max(worst, err);
    ++nets;
  }
  const double secs = seconds_since(t0);
  return {nets >= 100 && worst <= 1e-4 && secs < 60.0,
          fmt("%d nets, max relative error %.2e, %.2fs", nets, worst, secs)};
}

// ---------------------------------------------------------------------------

const envs::ActionSpace kBox =
    envs::ActionSpace::box(Eigen::VectorXd::Constant(1, -2), Eigen::VectorXd::Constant(1, 2));

replay::ReplayBuffer pendulum_buffer(int n, std::uint64_t seed) {
  replay::ReplayBuffer buf(static_cast<std::size_t>(n), 3, 1);
  envs::Pendulum env;
  Rng rng(seed);
  env.reset(seed);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd obs = env.observe();
    const envs::Action a = env.action_space().sample(rng);
    const envs::StepResult r = env.step(a);
    buf.push(replay::Transition{obs, a, r.reward, r.observation, false, false, i / 8});
  }
  return buf;
}

agents::Critic pendulum_critic(const std::vector<int>& hidden, Rng& rng) {
  std::vector<int> w{4};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(1);
  return agents::Critic(nn::Mlp::init(w, nn::Activation::kTanh, rng), agents::Critic::Input::kStateAction, kBox, 3);
}

std::vector<double> concat(std::initializer_list<std::vector<double>> parts) {
  std::vector<double> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Outcome im_transcription() {
  double worst = 0.0;
  int cases = 0;
  for (bool detach : {false, true}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      imagination::ImaginationConfig cfg;
      cfg.enabled = true;
      cfg.k = 2;
      cfg.feature_dim = 3;
      cfg.encoder_hidden = {5};
      cfg.din_hidden = {4};
      cfg.momentum = 0.95;
      cfg.loss_weight = seed == 3 ? 1.0 : 0.3;
      cfg.detach_target_critic = detach;
      const double lr = 3e-3;
      Rng rng(seed);
      agents::Critic critic = pendulum_critic({6}, rng);
      Rng init(seed + 100);
      auto s = imagination::ImaginationState::create(cfg, 3, kBox, {&critic}, lr, init);
      // Separate f_d from f_c so both sides of the pair matter.
      for (nn::Layer& l : s.target_encoder.layers()) {
        l.weight.array() += 0.15 * Eigen::ArrayXXd::Random(l.weight.rows(), l.weight.cols());
        l.bias.array() -= 0.05;
      }
      replay::ReplayBuffer buf = pendulum_buffer(32, seed);
      Rng pick(seed);
      const replay::Batch anchors = buf.sample_batch(5, pick);
      const replay::PairBatch pairs = buf.sample_pairs(anchors, 5, pick);

      testing::ImTranscription t;
      t.enc_w = testing::widths_of(s.online_encoder);
      t.din_w = testing::widths_of(s.dins[0]);
      t.critic_w = testing::widths_of(critic.network());
      t.target = testing::to_flat(s.target_encoder);
      t.k = cfg.k;
      t.fd = cfg.feature_dim;
      t.detach = detach;
      for (Eigen::Index b = 0; b < pairs.first.obs.cols(); ++b) {
        std::vector<double> x(pairs.first.obs.col(b).data(), pairs.first.obs.col(b).data() + 3);
        std::vector<double> xn(pairs.second.obs.col(b).data(), pairs.second.obs.col(b).data() + 3);
        x.push_back(pairs.first.actions(0, b));
        xn.push_back(pairs.second.actions(0, b));
        t.x.push_back(x);
        t.x_n.push_back(xn);
      }
      const std::vector<double> p = concat({testing::to_flat(s.online_encoder), testing::to_flat(s.dins[0]),
                                            testing::to_flat(critic.network())});
      const std::size_t shared = s.online_encoder.parameter_count() + s.dins[0].parameter_count();
      const double expected_loss = t.loss(p);
      std::vector<double> expected(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        std::vector<testing::Dual> dp = testing::lift(p);
        dp[i].d = 1.0;
        const double g = t.loss(dp).d;
        expected[i] = testing::adam_scalar(p[i], {g}, i < shared ? lr : cfg.loss_weight * lr, 0.9, 0.999, 1e-8);
      }
      std::vector<double> expected_target(t.target.size());
      for (std::size_t i = 0; i < t.target.size(); ++i)
        expected_target[i] = cfg.momentum * t.target[i] + (1 - cfg.momentum) * expected[i];

      const double loss = imagination::im_update(s, 0, critic, pairs, cfg);
      worst = std::max(worst, std::abs(loss - expected_loss));
      const std::vector<double> got = concat({testing::to_flat(s.online_encoder), testing::to_flat(s.dins[0]),
                                              testing::to_flat(critic.network())});
      for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - expected[i]));
      const std::vector<double> target = testing::to_flat(s.target_encoder);
      for (std::size_t i = 0; i < target.size(); ++i)
        worst = std::max(worst, std::abs(target[i] - expected_target[i]));
      ++cases;
    }
  }
  return {worst <= 1e-10, fmt("%d configurations, max abs deviation %.2e", cases, worst)};
}

// ---------------------------------------------------------------------------

Outcome stop_gradient_ema() {
  std::vector<std::string> problems;
  // Construction, for several shapes.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    imagination::ImaginationConfig cfg;
    cfg.enabled = true;
    cfg.k = 1 + static_cast<int>(seed % 4);
    cfg.feature_dim = 2 + static_cast<int>(seed % 3);
    Rng rng(seed);
    agents::Critic c1 = pendulum_critic({8}, rng), c2 = pendulum_critic({8}, rng);
    Rng init(seed);
    const auto s = imagination::ImaginationState::create(cfg, 3, kBox, {&c1, &c2}, 1e-3, init);
    if (!(s.target_encoder == s.online_encoder)) problems.push_back("f_d != f_c at construction");
    Archive ar;
    s.save(ar, "im");
    std::size_t fd_entries = 0;
    for (const Archive::Entry& e : ar.entries())
      if (e.name.rfind("im.f_d", 0) == 0) ++fd_entries;
    const std::size_t expected = [&] {
      Archive only;
      s.target_encoder.save(only, "im.f_d");
      return only.entries().size();
    }();
    if (fd_entries != expected) problems.push_back("target encoder carries extra state");
  }

  // Every update inside a full training run: DQN (one critic) on the chain.
  Trainer trainer(config("chain_dqn_im.json", 4));
  auto* im = dynamic_cast<imagination::ImaginationAgent*>(&trainer.agent());
  if (im == nullptr) return {false, "trainer did not attach the mechanism"};
  std::int64_t checked = 0;
  for (std::int64_t step = 1; step <= 3000; ++step) {
    const nn::Mlp before = im->state().target_encoder;
    trainer.run_until(step);
    nn::Mlp expected = before;
    if (step > trainer.config().train.warmup_steps) {
      nn::ema_update(expected, im->state().online_encoder, trainer.config().im.momentum);
      ++checked;
    }
    if (!(im->state().target_encoder == expected)) {
      problems.push_back(fmt("f_d off the EMA line at step %lld", static_cast<long long>(step)));
      break;
    }
  }

  // Two critics sharing an encoder pair: EMA after each critic's step.
  imagination::ImaginationConfig cfg;
  cfg.enabled = true;
  Rng rng(9);
  agents::Critic c1 = pendulum_critic({16}, rng), c2 = pendulum_critic({16}, rng);
  Rng init(9);
  auto s = imagination::ImaginationState::create(cfg, 3, kBox, {&c1, &c2}, 1e-3, init);
  replay::ReplayBuffer buf = pendulum_buffer(256, 9);
  Rng pick(9);
  for (int step = 0; step < 200; ++step) {
    for (std::size_t ci = 0; ci < 2; ++ci) {
      const replay::Batch anchors = buf.sample_batch(32, pick);
      const nn::Mlp before = s.target_encoder;
      imagination::im_update(s, ci, ci == 0 ? c1 : c2, buf.sample_pairs(anchors, 32, pick), cfg);
      nn::Mlp expected = before;
      nn::ema_update(expected, s.online_encoder, cfg.momentum);
      if (!(s.target_encoder == expected)) problems.push_back("twin-critic update left the EMA line");
      ++checked;
    }
  }
  const bool pass = problems.empty() && checked > 2000;
  return {pass, pass ? fmt("10 constructions, %lld updates on the EMA line", static_cast<long long>(checked))
                     : problems.front()};
}

// ---------------------------------------------------------------------------

Outcome noop_equivalence() {
  ExperimentConfig base = config("pendulum_sac.json", 11);
  base.train.total_steps = 3000;
  base.train.eval_every = 1000;
  base.train.eval_episodes = 2;
  ExperimentConfig attached = base;
  attached.im.enabled = true;
  attached.im.loss_weight = 0.0;
  attached.im.lr = 0.0;
  const fs::path a = scratch("noop_base"), b = scratch("noop_im");
  const RunMetrics ma = run_training(base, a);
  const RunMetrics mb = run_training(attached, b);
  if (ma.failed || mb.failed) return {false, "run failed"};
  const std::size_t im_loss_column = 5;
  const std::string ta = read_text(a / "train.csv"), tb = read_text(b / "train.csv");
  const bool train_same = drop_column(ta, im_loss_column) == drop_column(tb, im_loss_column);
  const bool eval_same = read_text(a / "eval.csv") == read_text(b / "eval.csv");
  bool im_active = false;
  for (const TrainRow& r : mb.train) im_active = im_active || r.im_loss != 0.0;

  Trainer ta_run(base), tb_run(attached);
  ta_run.run();
  tb_run.run();
  Archive pa, pb;
  ta_run.agent().save(pa, "agent");
  dynamic_cast<imagination::ImaginationAgent&>(tb_run.agent()).inner().save(pb, "agent");
  bool params_same = pa.entries().size() == pb.entries().size();
  for (std::size_t i = 0; params_same && i < pa.entries().size(); ++i)
    params_same = pa.entries()[i].name == pb.entries()[i].name && pa.entries()[i].data == pb.entries()[i].data;

  return {train_same && eval_same && params_same && im_active,
          fmt("%zu train rows; train.csv (excluding im_loss) %s, eval.csv %s, agent parameters %s, IM ran: %s",
              ma.train.size(), train_same ? "identical" : "DIFFERS", eval_same ? "identical" : "DIFFERS",
              params_same ? "identical" : "DIFFER", im_active ? "yes" : "no")};
}

// ---------------------------------------------------------------------------

double chain_sup_error(agents::Agent& agent) {
  agents::Agent* inner = &agent;
  if (auto* im = dynamic_cast<imagination::ImaginationAgent*>(&agent)) inner = &im->inner();
  const auto& dqn = dynamic_cast<agents::DqnAgent&>(*inner);
  const auto q = testing::chain_q_star(0.9);
  double sup = 0.0;
  for (int s = 0; s < 4; ++s) {
    Eigen::VectorXd obs = Eigen::VectorXd::Zero(5);
    obs(s) = 1.0;
    const Eigen::VectorXd qs = dqn.q_values(obs).col(0);
    for (int a = 0; a < 2; ++a) sup = std::max(sup, std::abs(qs(a) - q[s][a]));
  }
  return sup;
}

Outcome chain_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  int reached = 0, runs = 0;
  for (const char* file : {"chain_dqn.json", "chain_dqn_im.json"}) {
    detail += std::string(detail.empty() ? "" : "; ") + (std::string(file) == "chain_dqn.json" ? "dqn" : "dqn+im") + ":";
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const ExperimentConfig cfg = config(file, seed);
      Trainer t(cfg);
      std::int64_t hit = -1;
      for (std::int64_t step = 1000; step <= 20000 && hit < 0; step += 500) {
        t.run_until(step);
        if (t.metrics().failed) break;
        if (chain_sup_error(t.agent()) <= 0.05) hit = step;
      }
      ++runs;
      t.run();
      const double final_sup = chain_sup_error(t.agent());
      if (hit >= 0) {
        ++reached;
        detail += fmt(" %lld/%.3f", static_cast<long long>(hit), final_sup);
      } else {
        detail += fmt(" miss/%.3f", final_sup);
      }
    }
  }
  const double secs = seconds_since(t0);
  return {reached == runs && secs < 120.0, fmt("%d/%d runs within 0.05 of Q* (first step / error at 20k:%s), %.1fs", reached,
                                                runs, detail.c_str(), secs)};
}

// ---------------------------------------------------------------------------

std::optional<std::int64_t> first_at_least(const std::vector<EvalRow>& eval, double bar, std::int64_t limit) {
  for (const EvalRow& r : eval)
    if (r.step <= limit && r.mean_return >= bar) return r.step;
  return std::nullopt;
}

Outcome cartpole_learning() {
  const auto t0 = std::chrono::steady_clock::now();
  int ok = 0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RunMetrics m = run_training(config("cartpole_dqn.json", seed));
    const auto hit = first_at_least(m.eval, 195.0, 60000);
    if (hit) ++ok;
    detail += hit ? fmt(" %lld", static_cast<long long>(*hit)) : std::string(" miss");
  }
  return {ok >= 3, fmt("%d/5 seeds reach 195 (first step:%s), %.0fs", ok, detail.c_str(), seconds_since(t0))};
}

double sample_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

Outcome pendulum_learning() {
  const auto t0 = std::chrono::steady_clock::now();
  int ok = 0;
  std::vector<double> base, variant;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RunMetrics b = run_training(config("pendulum_sac.json", seed));
    const RunMetrics v = run_training(config("pendulum_sac_im.json", seed));
    if (b.failed || v.failed) return {false, fmt("seed %llu failed", static_cast<unsigned long long>(seed))};
    if (first_at_least(b.eval, -300.0, 50000)) ++ok;
    base.push_back(score_at(b.eval, 50000));
    variant.push_back(score_at(v.eval, 50000));
    detail += fmt(" [%.0f / %.0f]", base.back(), variant.back());
  }
  const double pooled = std::sqrt((std::pow(sample_std(base), 2) + std::pow(sample_std(variant), 2)) / 2.0);
  const double gap = mean_of(base) - mean_of(variant);
  const bool non_degraded = gap <= pooled;
  return {ok >= 3 && non_degraded,
          fmt("sac: %d/5 seeds reach -300; at 50k sac %.1f, sac+im %.1f, pooled std %.1f (sac / sac+im per seed:%s), "
              "%.0fs",
              ok, mean_of(base), mean_of(variant), pooled, detail.c_str(), seconds_since(t0))};
}

// ---------------------------------------------------------------------------

Outcome promotion_arithmetic() {
  const double a = promotion_percent(5228, 6652);
  const double b = promotion_percent(-86.60, -83.12);
  ArmSummary base, variant;
  base.label = "sac";
  variant.label = "sac+im";
  base.seeds = {SeedResult{0, false, "", -86.60, {}, {{100000, -86.60, 0}}}};
  variant.seeds = {SeedResult{0, false, "", -83.12, {}, {{100000, -83.12, 0}}}};
  const ComparisonReport r = build_report("reference", 100000, base, variant);
  const bool pass = std::abs(a - 27.24) <= 0.02 && std::abs(b - 4.01) <= 0.02 && std::abs(r.promotion - 4.01) <= 0.02;
  return {pass, fmt("27.24 -> %.4f, 4.01 -> %.4f (report %.4f)", a, b, r.promotion)};
}

// ---------------------------------------------------------------------------

Outcome determinism_and_resume() {
  std::vector<std::string> problems;
  int compared = 0;
  for (const char* file : {"pendulum_sac.json", "pendulum_sac_im.json", "chain_dqn_im.json", "cartpole_dqn.json"}) {
    ExperimentConfig cfg = config(file, 5);
    cfg.train.total_steps = 4000;
    cfg.train.eval_every = 1000;
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    run_training(cfg, a);
    run_training(cfg, b);
    for (const char* out : {"train.csv", "eval.csv", "final.ckpt", "config.echo.json"})
      if (read_text(a / out) != read_text(b / out)) problems.push_back(fmt("%s: %s differs", file, out));

    Trainer first(cfg);
    first.run_until(2500);
    first.save_checkpoint(a / "mid.ckpt");
    Trainer resumed = Trainer::from_checkpoint(a / "mid.ckpt");
    resumed.run();
    const fs::path c = scratch("det_c");
    resumed.write_outputs(c);
    for (const char* out : {"train.csv", "eval.csv", "final.ckpt"})
      if (read_text(a / out) != read_text(c / out)) problems.push_back(fmt("%s: resumed %s differs", file, out));
    ++compared;
  }
  return {problems.empty(), problems.empty()
                                ? fmt("%d configs: repeat runs and save/load/resume byte-identical", compared)
                                : problems.front()};
}

// ---------------------------------------------------------------------------

Outcome invariant_sweeps() {
  Rng rng(2718);
  long samples = 0, violations = 0;
  for (int i = 0; i < 100000; ++i) {
    const int n = 1 + static_cast<int>(rng.uniform_index(16));
    const double scale = std::pow(10.0, rng.uniform(-12, 12));
    Eigen::VectorXd u(n), v(n);
    for (int j = 0; j < n; ++j) {
      u(j) = scale * rng.normal();
      v(j) = rng.uniform() < 0.1 ? u(j) * -3.0 : rng.normal() / scale;
    }
    if (i % 97 == 0) u.setZero();
    const double c = nn::cosine_similarity(u, v);
    if (!(std::isfinite(c) && c >= -1.0 && c <= 1.0)) ++violations;
    ++samples;
  }
  for (int i = 0; i < 100000; ++i) {
    const int k = 1 + static_cast<int>(rng.uniform_index(6));
    const int fd = 1 + static_cast<int>(rng.uniform_index(8));
    Eigen::VectorXd q(k * fd), qn(k * fd);
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      q(j) = rng.uniform() < 0.05 ? 0.0 : 100 * rng.normal();
      qn(j) = rng.uniform() < 0.05 ? q(j) : rng.normal();
    }
    const Eigen::VectorXd s = imagination::similarity_vector(q, qn, k, fd);
    if (s.size() != k || !s.allFinite() || (s.array().abs() > 1.0).any()) ++violations;
    ++samples;
  }

  const double reward_floor = -(M_PI * M_PI + 0.1 * 64 + 0.001 * 4);
  long steps = 0;
  for (std::uint64_t ep = 0; ep < 500; ++ep) {
    envs::Pendulum env;
    env.reset(ep);
    Rng act(ep);
    for (int t = 0; t < 200; ++t) {
      const double u = ep % 5 == 0 ? 2.0 * (ep % 2 ? 1 : -1) : act.uniform(-4, 4);
      const envs::StepResult r = env.step(envs::Action(Eigen::VectorXd::Constant(1, std::clamp(u, -2.0, 2.0))));
      const envs::PendulumState& st = env.state();
      const Eigen::VectorXd& o = r.observation;
      if (!(r.reward <= 0.0 && r.reward >= reward_floor - 1e-12)) ++violations;
      if (std::abs(st.theta_dot) > 8.0 || std::abs(o(2)) > 8.0) ++violations;
      if (std::abs(o(0) * o(0) + o(1) * o(1) - 1.0) > 1e-12) ++violations;
      ++steps;
    }
  }
  return {violations == 0 && samples >= 200000,
          fmt("%ld similarity samples, %ld pendulum steps, %ld violations", samples, steps, violations)};
}

}  // namespace

int main(int argc, char** argv) {
  imrl::tune_allocator();
  const std::vector<Criterion> criteria{
      {"gradient-check", gradient_check},
      {"im-transcription", im_transcription},
      {"stop-gradient-ema", stop_gradient_ema},
      {"noop-equivalence", noop_equivalence},
      {"chain-oracle", chain_oracle},
      {"cartpole-learning", cartpole_learning},
      {"pendulum-learning", pendulum_learning},
      {"promotion-arithmetic", promotion_arithmetic},
      {"determinism-resume", determinism_and_resume},
      {"invariant-sweeps", invariant_sweeps},
  };

  CLI::App app{"acceptance criteria"};
  std::vector<std::string> only;
  bool list = false;
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_flag("--list", list, "print criterion names");
  CLI11_PARSE(app, argc, argv);
  if (list) {
    for (const Criterion& c : criteria) std::printf("%s\n", c.name.c_str());
    return 0;
  }
  for (const std::string& name : only) {
    if (std::none_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.name == name; })) {
      std::fprintf(stderr, "unknown criterion: %s\n", name.c_str());
      return 2;
    }
  }

  int failed = 0, ran = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %-22s %s\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
    ++ran;
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
