#include "imrl/envs/cartpole.hpp"
#include "imrl/envs/chain.hpp"
#include "imrl/envs/environment.hpp"
#include "imrl/envs/pendulum.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace imrl;
using namespace imrl::envs;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kPendulumRewardFloor = -(kPi * kPi + 0.1 * 64 + 0.001 * 4);
}  // namespace

TEST_CASE("pendulum: upright equilibrium costs nothing") {
  const auto [next, r] = pendulum_step(PendulumState{0.0, 0.0, 0}, 0.0);
  CHECK(next.theta == 0.0);
  CHECK(next.theta_dot == 0.0);
  CHECK(r.reward == 0.0);
  CHECK_FALSE(r.done);
}

TEST_CASE("pendulum: hanging down costs pi squared") {
  const auto [next, r] = pendulum_step(PendulumState{kPi, 0.0, 0}, 0.0);
  CHECK(r.reward == doctest::Approx(-9.869604401089358).epsilon(1e-15));
  (void)next;
}

TEST_CASE("pendulum: one Euler step by hand") {
  const auto [next, r] = pendulum_step(PendulumState{kPi / 2, 0.0, 0}, 2.0);
  // theta_dot = (15 * sin(pi/2) + 6) * 0.05 = 1.05; theta = pi/2 + 1.05 * 0.05
  CHECK(next.theta_dot == doctest::Approx(1.05).epsilon(1e-15));
  CHECK(next.theta == doctest::Approx(kPi / 2 + 0.0525).epsilon(1e-15));
  CHECK(r.reward == doctest::Approx(-(kPi * kPi / 4 + 0.004)).epsilon(1e-15));
  const Eigen::VectorXd obs = r.observation;
  CHECK(obs(0) == doctest::Approx(std::cos(kPi / 2 + 0.0525)));
  CHECK(obs(1) == doctest::Approx(std::sin(kPi / 2 + 0.0525)));
  CHECK(obs(2) == doctest::Approx(1.05));
}

TEST_CASE("pendulum: torque clamp and rejection") {
  const auto [a, ra] = pendulum_step(PendulumState{0.3, 0.1, 0}, 50.0);
  const auto [b, rb] = pendulum_step(PendulumState{0.3, 0.1, 0}, 2.0);
  CHECK(a.theta_dot == b.theta_dot);
  CHECK(ra.reward == rb.reward);
  CHECK_THROWS_AS(pendulum_step(PendulumState{}, std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
  CHECK_THROWS_AS(pendulum_step(PendulumState{}, std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("pendulum: wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_angle(0.25) == 0.25);
  Rng rng(8);
  for (int i = 0; i < 10000; ++i) {
    const double w = wrap_angle(rng.uniform(-100, 100));
    CHECK(w > -kPi);
    CHECK(w <= kPi);
  }
}

TEST_CASE("pendulum: reward bounds and velocity clamp over random rollouts") {
  Pendulum env;
  Rng rng(2024);
  for (int ep = 0; ep < 200; ++ep) {
    env.reset(rng.next_u64());
    bool over = false;
    int steps = 0;
    while (!over) {
      const StepResult r = env.step(Eigen::VectorXd::Constant(1, rng.uniform(-3, 3)));
      REQUIRE(r.reward <= 0.0);
      REQUIRE(r.reward >= kPendulumRewardFloor);
      REQUIRE(std::abs(env.state().theta_dot) <= 8.0);
      REQUIRE(std::abs(r.observation(0) * r.observation(0) + r.observation(1) * r.observation(1) - 1.0) <= 1e-9);
      over = r.truncated || r.done;
      ++steps;
    }
    CHECK(steps == 200);
  }
}

TEST_CASE("pendulum: reset depends only on the seed") {
  Pendulum a, b;
  const Eigen::VectorXd o1 = a.reset(7);
  a.step(Eigen::VectorXd::Constant(1, 1.0));
  const Eigen::VectorXd o2 = a.reset(7);
  CHECK(o1 == o2);
  CHECK(b.reset(7) == o1);
  CHECK(b.reset(8) != o1);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    a.reset(rng.next_u64());
    CHECK(std::abs(a.state().theta) <= kPi);
    CHECK(std::abs(a.state().theta_dot) <= 1.0);
  }
}

TEST_CASE("pendulum: truncation at 200 steps") {
  Pendulum env;
  env.reset(1);
  StepResult r;
  for (int i = 0; i < 199; ++i) {
    r = env.step(Eigen::VectorXd::Zero(1));
    CHECK_FALSE(r.truncated);
  }
  r = env.step(Eigen::VectorXd::Zero(1));
  CHECK(r.truncated);
  CHECK_FALSE(r.done);
}

namespace {

// Independent transcription of the classic cart-pole Euler update.
CartPoleState cartpole_reference(CartPoleState s, int action) {
  const double g = 9.8, mc = 1.0, mp = 0.1, l = 0.5, dt = 0.02;
  const double total = mc + mp, pml = mp * l;
  const double f = action == 1 ? 10.0 : -10.0;
  const double c = std::cos(s.theta), sn = std::sin(s.theta);
  const double temp = (f + pml * s.theta_dot * s.theta_dot * sn) / total;
  const double th_acc = (g * sn - c * temp) / (l * (4.0 / 3.0 - mp * c * c / total));
  const double x_acc = temp - pml * th_acc * c / total;
  s.x += dt * s.x_dot;
  s.x_dot += dt * x_acc;
  s.theta += dt * s.theta_dot;
  s.theta_dot += dt * th_acc;
  s.steps += 1;
  return s;
}

}  // namespace

TEST_CASE("cartpole: dynamics match the reference transcription") {
  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    const CartPoleState s{rng.uniform(-2, 2), rng.uniform(-1, 1), rng.uniform(-0.2, 0.2), rng.uniform(-1, 1), 3};
    const int a = static_cast<int>(rng.uniform_index(2));
    const auto [next, r] = cartpole_step(s, a);
    const CartPoleState ref = cartpole_reference(s, a);
    CHECK(next.x == doctest::Approx(ref.x).epsilon(1e-14));
    CHECK(next.x_dot == doctest::Approx(ref.x_dot).epsilon(1e-14));
    CHECK(next.theta == doctest::Approx(ref.theta).epsilon(1e-14));
    CHECK(next.theta_dot == doctest::Approx(ref.theta_dot).epsilon(1e-14));
    CHECK(next.steps == 4);
    CHECK(r.reward == 1.0);
  }
}

TEST_CASE("cartpole: balanced start survives alternating pushes") {
  CartPoleState s{};
  for (int i = 0; i < 4; ++i) {
    const auto [next, r] = cartpole_step(s, i % 2);
    CHECK(r.reward == 1.0);
    CHECK_FALSE(r.done);
    s = next;
  }
}

TEST_CASE("cartpole: termination at the angle and position limits") {
  const double limit = 12.0 * 2.0 * kPi / 360.0;
  auto [a, ra] = cartpole_step(CartPoleState{0, 0, limit - 1e-6, 1.0, 0}, 1);
  CHECK(a.theta > limit);
  CHECK(ra.done);
  auto [b, rb] = cartpole_step(CartPoleState{0, 0, limit - 0.05, 0.0, 0}, 1);
  CHECK_FALSE(rb.done);
  auto [c, rc] = cartpole_step(CartPoleState{2.4, 1.0, 0, 0, 0}, 1);
  CHECK(rc.done);
  CHECK_THROWS_AS(cartpole_step(CartPoleState{}, 2), std::invalid_argument);
  CHECK_THROWS_AS(cartpole_step(CartPoleState{}, -1), std::invalid_argument);
  (void)b;
  (void)c;
}

TEST_CASE("cartpole: truncation at 500 and reset range") {
  auto [s, r] = cartpole_step(CartPoleState{0, 0, 0, 0, 499}, 1);
  CHECK(r.truncated);
  CHECK_FALSE(r.done);
  CartPole env;
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd o = env.reset(rng.next_u64());
    CHECK(o.cwiseAbs().maxCoeff() <= 0.05);
  }
  (void)s;
}

TEST_CASE("chain: transitions") {
  auto [g, rg] = chain_step(ChainState{3, 0}, ChainParams::kRight);
  CHECK(g.position == 4);
  CHECK(rg.reward == 1.0);
  CHECK(rg.done);
  auto [f, rf] = chain_step(ChainState{0, 0}, ChainParams::kLeft);
  CHECK(f.position == 0);
  CHECK(rf.reward == 0.0);
  CHECK_FALSE(rf.done);
  auto [m, rm] = chain_step(ChainState{2, 0}, ChainParams::kLeft);
  CHECK(m.position == 1);
  CHECK(rm.observation == chain_observation(ChainState{1, 1}));
  auto [t, rt] = chain_step(ChainState{0, 49}, ChainParams::kLeft);
  CHECK(rt.truncated);
  (void)t;
}

TEST_CASE("chain: reset is deterministic") {
  Chain env;
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(5);
  expected(0) = 1.0;
  CHECK(env.reset(0) == expected);
  CHECK(env.reset(123456) == expected);
}

TEST_CASE("chain: value iteration gives the closed-form Q* table") {
  const auto q = testing::chain_q_star(0.9);
  CHECK(q[0][1] == doctest::Approx(0.729).epsilon(1e-12));
  CHECK(q[1][1] == doctest::Approx(0.81).epsilon(1e-12));
  CHECK(q[2][1] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(q[3][1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q[0][0] == doctest::Approx(0.6561).epsilon(1e-12));
  CHECK(q[1][0] == doctest::Approx(0.6561).epsilon(1e-12));
  CHECK(q[2][0] == doctest::Approx(0.729).epsilon(1e-12));
  CHECK(q[3][0] == doctest::Approx(0.81).epsilon(1e-12));
}

TEST_CASE("environments: identical seed and actions give identical trajectories") {
  for (const char* name : {"pendulum", "cartpole", "chain"}) {
    auto a = make_environment(name);
    auto b = make_environment(name);
    Rng ra(5), rb(5);
    a->reset(99);
    b->reset(99);
    for (int i = 0; i < 300; ++i) {
      const Action act_a = a->action_space().sample(ra);
      const Action act_b = b->action_space().sample(rb);
      const StepResult x = a->step(act_a);
      const StepResult y = b->step(act_b);
      REQUIRE(x.observation == y.observation);
      REQUIRE(x.reward == y.reward);
      if (x.done || x.truncated) {
        a->reset(i);
        b->reset(i);
      }
    }
  }
  CHECK_THROWS_AS(make_environment("acrobot"), std::invalid_argument);
}

TEST_CASE("environments: state vector round trip") {
  for (const char* name : {"pendulum", "cartpole", "chain"}) {
    auto a = make_environment(name);
    auto b = make_environment(name);
    a->reset(4);
    Rng r(1);
    a->step(a->action_space().sample(r));
    b->set_state_vector(a->state_vector());
    CHECK(b->observe() == a->observe());
    CHECK(b->steps() == a->steps());
    const Action act = a->action_space().sample(r);
    CHECK(a->step(act).observation == b->step(act).observation);
  }
}

TEST_CASE("action spaces") {
  const ActionSpace d = ActionSpace::discrete(3);
  CHECK(d.contains(discrete_action(2)));
  CHECK_FALSE(d.contains(discrete_action(3)));
  Eigen::MatrixXd a(1, 2);
  a << 2, 0;
  const Eigen::MatrixXd onehot = d.encode(a);
  CHECK(onehot.rows() == 3);
  CHECK(onehot(2, 0) == 1.0);
  CHECK(onehot(0, 1) == 1.0);
  CHECK(onehot.sum() == 2.0);
  const ActionSpace box = ActionSpace::box(Eigen::VectorXd::Constant(1, -2), Eigen::VectorXd::Constant(1, 2));
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) CHECK(box.contains(box.sample(rng)));
  CHECK_FALSE(box.contains(Eigen::VectorXd::Constant(1, 2.5)));
}
