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

#include "collab/dynamics.hpp"

#include <cmath>

#include "collab/topology.hpp"

namespace collab
{

void StickModel::validate() const
{
  if (!(length > 0.0)) {
    throw ConfigError("stick length must be positive");
  }
  if (!(dt > 0.0)) {
    throw ConfigError("dt must be positive");
  }
  if (!(robot_speed_cap > 0.0) || !(human_speed_cap > 0.0)) {
    throw ConfigError("speed caps must be positive");
  }
}

TeamState step(
  const TeamState & state, const Vec2 & a, const Vec2 & u, const StickModel & model,
  const Context & c)
{
  const Vec2 span = state.human_end() - state.robot_end();
  if (std::abs(span.norm() - model.length) > TeamState::kRigidityTolerance) {
    throw DomainError("state does not match the stick model length");
  }
  const Vec2 human = a.clamped(model.human_speed_cap);
  const Vec2 robot = u.clamped(model.robot_speed_cap);

  const double h = state.object().heading();
  const Vec2 e(std::cos(h), std::sin(h));
  const double stretch = (human - robot).dot(e);
  const Vec2 human_rigid = human - e * (0.5 * stretch);
  const Vec2 robot_rigid = robot + e * (0.5 * stretch);

  const Vec2 v = (human_rigid + robot_rigid) * 0.5;
  const double omega = e.cross(human_rigid - robot_rigid) / model.length;

  const Vec2 mid = state.object().position() + v * model.dt;
  const Pose2 pose(mid, h + omega * model.dt);

  auto windings = state.windings();
  if (!c.obstacles.empty()) {
    WindingAccumulator acc{std::move(windings), state.object().position()};
    windings = winding_update(std::move(acc), mid, c.obstacles).windings;
  }
  return TeamState::from_pose(
    pose, model.length, human, robot, std::move(windings), state.time() + model.dt);
}

HumanPrediction predict_human(
  std::span<const Vec2> history, std::size_t steps, const StickModel & model)
{
  const Vec2 latest = history.empty() ? Vec2{} : history.back().clamped(model.human_speed_cap);
  return HumanPrediction{std::vector<Vec2>(steps, latest)};
}

}  // namespace collab
