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

#ifndef COLLAB__SCENARIO_HPP_
#define COLLAB__SCENARIO_HPP_

#include <cstdint>
#include <vector>

#include "collab/harness.hpp"

namespace collab
{

/// A batch experiment template: one context, one simulated partner, and the
/// start configurations to cycle through.
struct Scenario
{
  Context context;
  Vec2 start_position{0.0, -2.2};
  std::vector<StartConfig> starts{
    StartConfig::kSideBySide, StartConfig::kHumanBehind, StartConfig::kHumanInFront};
  /// IC-MPC parameters; the vanilla variant runs the same config with w_ent = 0.
  ControllerConfig controller;
  InferenceParams inference;
  StickModel model;
  HumanPolicy human;
  double timeout{90.0};

  void validate() const;

  /// The study layout: 2.8 x 5.6 m workspace, one 0.15 m square obstacle at
  /// the center, goal 4.4 m ahead of the start, random-side committed human.
  static Scenario study();
  /// The study layout without the obstacle.
  static Scenario obstacle_free();
};

/// Per-trial seed: base_seed folded with (algorithm, start index, trial index)
/// through SplitMix64.
std::uint64_t trial_seed(
  std::uint64_t base_seed, Algorithm algorithm, std::size_t start_index, std::size_t trial_index);

/// Trial for one cell of the experiment grid.
TrialConfig make_trial(
  const Scenario & scenario, Algorithm algorithm, std::size_t start_index, std::uint64_t seed);

}  // namespace collab

#endif  // COLLAB__SCENARIO_HPP_
