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

#include "collab/humansim.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "collab/seed.hpp"

namespace collab
{

std::string to_string(HumanKind kind)
{
  switch (kind) {
    case HumanKind::kCommitted: return "committed";
    case HumanKind::kCompliant: return "compliant";
    case HumanKind::kStubborn: return "stubborn";
    case HumanKind::kNoisyCommitted: return "noisy-committed";
  }
  return "committed";
}

HumanKind parse_human_kind(const std::string & text)
{
  if (text == "committed") {
    return HumanKind::kCommitted;
  }
  if (text == "compliant") {
    return HumanKind::kCompliant;
  }
  if (text == "stubborn") {
    return HumanKind::kStubborn;
  }
  if (text == "noisy-committed") {
    return HumanKind::kNoisyCommitted;
  }
  throw ConfigError("unknown human policy kind '" + text + "'");
}

void HumanPolicy::validate(double human_speed_cap) const
{
  if (!(speed >= 0.0 && speed <= human_speed_cap)) {
    throw ConfigError("human speed must lie in [0, human_speed_cap]");
  }
  if (committed() && !target && !random_target) {
    throw ConfigError("committed human policies require a target strategy");
  }
  if (!(noise_sigma >= 0.0)) {
    throw ConfigError("human noise_sigma must be non-negative");
  }
  if (!(yield_clearance > 0.0)) {
    throw ConfigError("yield_clearance must be positive");
  }
}

namespace
{

// Direction the human pushes to realize `label`: the likelihood mode for the
// nearest unpassed obstacle, or the goal once all are passed. Zero at the goal.
Vec2 heading_for(
  const StrategyLabel & label, const TeamState & state, const Context & c,
  const InferenceParams & params)
{
  const auto active = c.obstacles.empty() ? std::nullopt : active_obstacle(state, c, params);
  if (!active) {
    if (c.goal.position() == state.object().position()) {
      return Vec2{};
    }
    return goal_direction(state, c);
  }
  if (label.signs.size() != c.obstacles.size()) {
    throw ConfigError("target strategy does not match the obstacle count");
  }
  return strategy_mode_direction(label.signs[*active], *active, state, c, params);
}

double stick_clearance(const TeamState & state, const Context & c)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto & o : c.obstacles) {
    best = std::min(best, segment_square_distance(state.robot_end(), state.human_end(), o));
  }
  return best;
}

// True when the robot's last velocity favors a different side of the active
// obstacle than `label`.
bool robot_disagrees(
  const StrategyLabel & label, const TeamState & state, const Context & c,
  const InferenceParams & params)
{
  const auto active = c.obstacles.empty() ? std::nullopt : active_obstacle(state, c, params);
  if (!active) {
    return false;
  }
  const int own = label.signs[*active];
  const Vec2 & u = state.robot_vel();
  const double agree = u.dot(strategy_mode_direction(own, *active, state, c, params));
  const double oppose = u.dot(strategy_mode_direction(-own, *active, state, c, params));
  return oppose > agree;
}

}  // namespace

Vec2 act(
  const HumanPolicy & policy, const TeamState & state, const Context & c,
  const InferenceParams & params, const StrategyDistribution & belief, std::uint64_t tick)
{
  if (policy.kind == HumanKind::kCompliant) {
    const auto labels = strategy_space(c);
    const std::size_t pick =
      belief.probs.size() == labels.size() ? belief.argmax() : std::size_t{0};
    return heading_for(labels[pick], state, c, params) * policy.speed;
  }

  if (!policy.target) {
    throw ConfigError("committed human policy has no resolved target");
  }
  const StrategyLabel & target = *policy.target;
  double speed = policy.speed;
  if (policy.kind != HumanKind::kStubborn && !c.obstacles.empty() &&
    robot_disagrees(target, state, c, params))
  {
    speed *= std::clamp(stick_clearance(state, c) / policy.yield_clearance, 0.0, 1.0);
  }
  Vec2 v = heading_for(target, state, c, params) * speed;

  if (policy.kind == HumanKind::kNoisyCommitted && policy.noise_sigma > 0.0) {
    std::mt19937_64 rng(mix_seed(policy.seed, {tick}));
    std::normal_distribution<double> noise(0.0, policy.noise_sigma);
    const double nx = noise(rng);
    const double ny = noise(rng);
    v += Vec2(nx, ny);
  }
  return v;
}

}  // namespace collab
