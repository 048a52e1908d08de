// Copyright (c) 2026 The collabtransport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"

#include "collab/controller.hpp"
#include "collab/dynamics.hpp"
#include "oracles.hpp"

using collab::Context;
using collab::ControllerConfig;
using collab::HumanPrediction;
using collab::InferenceParams;
using collab::Pose2;
using collab::StickModel;
using collab::TeamState;
using collab::Vec2;

namespace
{

Context study_context()
{
  Context c;
  c.goal = Pose2(Vec2(0.0, 2.2), std::numbers::pi / 2);
  c.obstacles = {collab::Obstacle{Vec2(0.0, 0.0), 0.075}};
  return c;
}

TeamState at(Vec2 p, double heading, double w)
{
  return TeamState::from_pose(Pose2(p, heading), 0.914, Vec2{}, Vec2{}, {w}, 0.0);
}

}  // namespace

TEST_CASE("terminal cost examples")
{
  const Pose2 g(Vec2(0.0, 2.2), 0.0);
  CHECK(collab::terminal_cost(g, g) == 0.0);
  CHECK(collab::terminal_cost(Pose2(Vec2(1.0, 2.2), 1.0), g) == doctest::Approx(1.0));
  CHECK(collab::terminal_cost(Pose2(Vec2(0.0, 0.2), 0.0), g) == doctest::Approx(4.0));
  CHECK(collab::terminal_cost(Pose2(Vec2(0.0, 2.2), 0.5), g, 2.0) == doctest::Approx(0.5));
}

TEST_CASE("obstacle cost examples")
{
  const auto c = study_context();
  const double delta = 0.5;
  // Stick along x at height y: its distance to the origin is |y|.
  auto at_height = [](double y) {return at(Vec2(0.0, y), 0.0, 0.0);};
  CHECK(collab::obstacle_cost(at_height(delta), c, delta) == doctest::Approx(0.0));
  CHECK(collab::obstacle_cost(at_height(delta / std::exp(1.0)), c, delta) ==
    doctest::Approx(1.0).epsilon(1e-12));
  CHECK(collab::obstacle_cost(at_height(2 * delta), c, delta) == 0.0);
  CHECK(collab::obstacle_cost(at_height(0.0), c, delta) == collab::kObstacleCostCap);
  CHECK(collab::obstacle_cost(at_height(1e-300), c, delta) <= collab::kObstacleCostCap);
}

TEST_CASE("entropy cost examples")
{
  const auto c = study_context();
  InferenceParams params;
  params.beta = 1.0;
  const auto passed = at(Vec2(0.5, 0.5), 0.0, 0.3);
  CHECK(collab::entropy_cost(passed, Vec2(0.1, 0.0), Vec2(-0.3, 0.0), c, params) == 0.0);

  const auto s = at(Vec2(0.0, -1.0), 0.0, 0.0);
  const Vec2 left = collab::strategy_mode_direction(-1, 0, s, c, params);
  const double p = std::exp(2.0) / (std::exp(2.0) + std::exp(-1.0));
  CHECK(std::abs(collab::entropy_cost(s, left, left, c, params) - oracle::entropy({p, 1 - p})) <=
    1e-12);
  CHECK(collab::entropy_cost(s, Vec2{}, Vec2(0.0, 1.0), c, params) ==
    doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("rollout cost of a converged state is near zero")
{
  Context c = study_context();
  ControllerConfig config;
  const StickModel model;
  const InferenceParams params;
  const auto s = at(c.goal.position(), std::numbers::pi / 2, 0.5);
  const std::vector<Vec2> zeros(config.horizon_steps);
  const HumanPrediction still{zeros};
  CHECK(collab::rollout_cost(s, zeros, still, c, config, params, model) ==
    doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero entropy weight leaves obstacle and terminal terms")
{
  const Context c = study_context();
  ControllerConfig config;
  config.w_ent = 0.0;
  const StickModel model;
  const InferenceParams params;
  const auto s = at(Vec2(0.3, -1.0), 0.2, 0.0);
  std::mt19937_64 rng(37);
  std::normal_distribution<double> n(0.0, 0.15);
  std::vector<Vec2> controls;
  for (std::size_t k = 0; k < config.horizon_steps; ++k) {
    controls.push_back(Vec2(n(rng), n(rng)).clamped(0.3));
  }
  const HumanPrediction human{std::vector<Vec2>(config.horizon_steps, Vec2(0.05, 0.2))};
  const auto r = collab::rollout(s, controls, human, c, config, params, model);
  double expected = 0.0;
  double discount = 1.0;
  for (std::size_t k = 0; k < r.obstacle.size(); ++k) {
    expected += discount * r.obstacle[k];
    discount *= config.gamma;
  }
  expected += collab::terminal_cost(r.states.back().object(), c.goal);
  CHECK(r.cost == doctest::Approx(expected).epsilon(1e-14));
  // Diagnostics still report the entropy the observer would have.
  CHECK(r.entropy.front() > 0.0);
}

TEST_CASE("driving at the obstacle costs more than a clearing detour")
{
  Context c = study_context();
  c.goal = Pose2(Vec2(0.0, 1.5), std::numbers::pi / 2);
  ControllerConfig config;
  config.horizon_steps = 40;
  config.w_ent = 0.0;
  const StickModel model;
  const InferenceParams params;
  const auto s = at(Vec2(0.02, -1.5), std::numbers::pi / 2, 0.0);

  const double alpha = 40.0 * std::numbers::pi / 180.0;
  std::vector<Vec2> straight(40, Vec2(0.0, 0.3));
  std::vector<Vec2> detour;
  for (int k = 0; k < 40; ++k) {
    const double side = k < 20 ? 1.0 : -1.0;
    detour.push_back(Vec2(side * 0.3 * std::sin(alpha), 0.3 * std::cos(alpha)));
  }
  const double j_straight =
    collab::rollout_cost(s, straight, HumanPrediction{straight}, c, config, params, model);
  const double j_detour =
    collab::rollout_cost(s, detour, HumanPrediction{detour}, c, config, params, model);
  CHECK(j_straight > j_detour);
}

TEST_CASE("softmin weights match the long-double oracle")
{
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> cost(0.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> costs(100);
    for (auto & j : costs) {
      j = cost(rng);
    }
    const auto got = collab::softmin_weights(costs, 0.1);
    const auto want = oracle::softmin(costs, 0.1);
    for (std::size_t i = 0; i < costs.size(); ++i) {
      CHECK(std::abs(got[i] - want[i]) <= 1e-12);
    }
  }
  const std::vector<double> inf{1.0, std::numeric_limits<double>::infinity()};
  CHECK(collab::softmin_weights(inf, 0.1) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("shift_nominal interpolates by elapsed time")
{
  ControllerConfig config;
  config.horizon_steps = 4;
  collab::Plan prev;
  prev.controls = {Vec2(0, 0), Vec2(0.1, 0), Vec2(0.2, 0), Vec2(0.3, 0)};
  prev.time = 1.0;
  const auto same = collab::shift_nominal(prev, 1.0, config);
  CHECK(same == prev.controls);
  const auto half = collab::shift_nominal(prev, 1.125, config);
  CHECK(half[0].x() == doctest::Approx(0.05));
  CHECK(half[2].x() == doctest::Approx(0.25));
  CHECK(half[3].x() == doctest::Approx(0.3));
  CHECK(collab::shift_nominal(collab::Plan{}, 0.0, config) == std::vector<Vec2>(4, Vec2{}));
}

TEST_CASE("plans are seeded, thread-count independent and within the speed cap")
{
  const Context c = study_context();
  ControllerConfig config;
  config.seed = 99;
  const StickModel model;
  const InferenceParams params;
  const auto s = at(Vec2(0.1, -2.0), 0.1, 0.0);
  const std::vector<Vec2> history{Vec2(0.2, 0.2)};

  const auto p1 = collab::plan(s, c, history, collab::Plan{}, config, params, model);
  const auto p2 = collab::plan(s, c, history, collab::Plan{}, config, params, model);
  CHECK(p1.controls == p2.controls);
  CHECK(p1.expected_cost == p2.expected_cost);
  CHECK(p1.entropy_trace == p2.entropy_trace);
  CHECK(p1.iteration == 1);

  config.threads = 4;
  const auto p4 = collab::plan(s, c, history, collab::Plan{}, config, params, model);
  CHECK(p4.controls == p1.controls);

  config.seed = 100;
  const auto other = collab::plan(s, c, history, collab::Plan{}, config, params, model);
  CHECK(other.controls != p1.controls);

  for (const auto & u : p1.controls) {
    CHECK(u.norm() <= config.speed_cap);
  }
  CHECK(p1.path.size() == config.horizon_steps);
  CHECK(p1.entropy_trace.size() == config.horizon_steps);
}

TEST_CASE("a team at the goal barely moves")
{
  const Context c = study_context();
  ControllerConfig config;
  const StickModel model;
  const InferenceParams params;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    config.seed = seed;
    const auto s = at(c.goal.position(), std::numbers::pi / 2, 0.5);
    const auto p = collab::plan(s, c, {}, collab::Plan{}, config, params, model);
    CHECK(p.controls.front().norm() <= 0.05);
  }
}

TEST_CASE("a pure goal-seeker keeps lowering its expected cost")
{
  Context c = study_context();
  c.obstacles.clear();
  ControllerConfig config;
  config.w_ent = 0.0;
  config.w_obs = 0.0;
  const StickModel model;
  const InferenceParams params;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    config.seed = seed;
    auto s = TeamState::from_pose(
      Pose2(Vec2(0.0, -2.2), 0.0), 0.914, Vec2{}, Vec2{}, {}, 0.0);
    collab::Plan nominal;
    double first = 0.0;
    double worst_ratio = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double prev = nominal.expected_cost;
      nominal = collab::plan(s, c, {}, nominal, config, params, model);
      if (i == 0) {
        first = nominal.expected_cost;
      } else {
        worst_ratio = std::max(worst_ratio, nominal.expected_cost / prev);
      }
      s = collab::step(s, Vec2{}, nominal.controls.front(), model, c);
    }
    // Sampling noise may raise the cost between replans, by at most 5%.
    CHECK(worst_ratio <= 1.05);
    CHECK(nominal.expected_cost < first);
  }
}

TEST_CASE("ControllerConfig validation and variants")
{
  ControllerConfig config;
  CHECK_NOTHROW(config.validate());
  CHECK(ControllerConfig::for_algorithm(collab::Algorithm::kVanilla).w_ent == 0.0);
  CHECK(ControllerConfig::for_algorithm(collab::Algorithm::kIcMpc).w_ent == 1.0);
  config.gamma = 1.5;
  CHECK_THROWS_AS(config.validate(), collab::ConfigError);
  config = ControllerConfig{};
  config.samples = 0;
  CHECK_THROWS_AS(config.validate(), collab::ConfigError);
  CHECK(collab::parse_algorithm("icmpc") == collab::Algorithm::kIcMpc);
  CHECK_THROWS_AS(collab::parse_algorithm("mpc"), collab::ConfigError);
}
