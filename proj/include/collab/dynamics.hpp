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

#ifndef COLLAB__DYNAMICS_HPP_
#define COLLAB__DYNAMICS_HPP_

#include <span>
#include <vector>

#include "collab/workspace.hpp"

namespace collab
{

/// Quasistatic rigid-stick transport model.
struct StickModel
{
  double length{0.914};
  double dt{1.0 / 15.0};
  double robot_speed_cap{0.3};
  double human_speed_cap{1.0};

  void validate() const;
};

/// Predicted human endpoint velocity for each rollout step.
struct HumanPrediction
{
  std::vector<Vec2> velocities;
};

/// Advances the team one step of `model.dt`.
///
/// Both endpoint velocities are clamped to their caps, then the component that
/// would stretch or compress the stick is removed by splitting it equally
/// between the two ends. The remaining motion is a midpoint translation plus a
/// rotation about the midpoint; endpoints are recomputed from the new pose, so
/// the stick length cannot drift. Windings are advanced along the midpoint.
///
/// Throws DomainError if `state` does not match the model's stick length.
TeamState step(
  const TeamState & state, const Vec2 & a, const Vec2 & u, const StickModel & model,
  const Context & c);

/// Constant-velocity prediction: the newest observation (clamped to the human
/// cap) repeated `steps` times; zeros on an empty history.
HumanPrediction predict_human(
  std::span<const Vec2> history, std::size_t steps, const StickModel & model);

}  // namespace collab

#endif  // COLLAB__DYNAMICS_HPP_
