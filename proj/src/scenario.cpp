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

#include "collab/scenario.hpp"

#include "collab/seed.hpp"

namespace collab
{

void Scenario::validate() const
{
  if (starts.empty()) {
    throw ConfigError("scenario lists no start configurations");
  }
  // A representative trial exercises every cross-field check.
  make_trial(*this, Algorithm::kIcMpc, 0, 0).validate();
}

Scenario Scenario::study()
{
  Scenario s;
  s.context.goal = Pose2(Vec2(0.0, 2.2), std::numbers::pi / 2.0);
  s.context.obstacles = {Obstacle{Vec2(0.0, 0.0), 0.075}};
  s.human.kind = HumanKind::kCommitted;
  s.human.random_target = true;
  return s;
}

Scenario Scenario::obstacle_free()
{
  Scenario s = study();
  s.context.obstacles.clear();
  s.human.random_target = false;
  s.human.target = StrategyLabel{};
  return s;
}

std::uint64_t trial_seed(
  std::uint64_t base_seed, Algorithm algorithm, std::size_t start_index, std::size_t trial_index)
{
  return mix_seed(base_seed, {fnv1a(to_string(algorithm)), start_index, trial_index});
}

TrialConfig make_trial(
  const Scenario & scenario, Algorithm algorithm, std::size_t start_index, std::uint64_t seed)
{
  TrialConfig t;
  t.context = scenario.context;
  t.start = scenario.starts.at(start_index);
  t.start_position = scenario.start_position;
  t.algorithm = algorithm;
  t.human = scenario.human;
  t.controller = scenario.controller;
  t.inference = scenario.inference;
  t.model = scenario.model;
  t.timeout = scenario.timeout;
  t.seed = seed;
  return t;
}

}  // namespace collab
