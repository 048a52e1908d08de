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

#include "collab/topology.hpp"

#include <cmath>
#include <numbers>

namespace collab
{

std::string StrategyLabel::name() const
{
  if (signs.empty()) {
    return "NONE";
  }
  if (signs.size() == 1) {
    return signs[0] < 0 ? "LEFT" : "RIGHT";
  }
  std::string out;
  out.reserve(signs.size());
  for (auto s : signs) {
    out.push_back(s < 0 ? '-' : '+');
  }
  return out;
}

StrategyLabel StrategyLabel::parse(const std::string & text)
{
  if (text == "NONE") {
    return {};
  }
  if (text == "LEFT") {
    return left();
  }
  if (text == "RIGHT") {
    return right();
  }
  StrategyLabel label;
  for (char c : text) {
    if (c == '-') {
      label.signs.push_back(-1);
    } else if (c == '+') {
      label.signs.push_back(+1);
    } else {
      throw ConfigError("malformed strategy label '" + text + "'");
    }
  }
  if (label.signs.size() < 2) {
    throw ConfigError("malformed strategy label '" + text + "'");
  }
  return label;
}

WindingAccumulator winding_update(
  WindingAccumulator acc, const Vec2 & p_new, std::span<const Obstacle> obstacles)
{
  if (acc.windings.size() != obstacles.size()) {
    throw DomainError("winding accumulator does not match the obstacle count");
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const Vec2 & o = obstacles[i].center;
    const double turns = signed_angle(acc.last - o, p_new - o) / two_pi;
    if (std::abs(turns) >= 0.5) {
      throw SamplingDensityError("path step sweeps half a turn about an obstacle center");
    }
    acc.windings[i] += turns;
  }
  acc.last = p_new;
  return acc;
}

StrategyLabel label_from_windings(std::span<const double> windings)
{
  StrategyLabel label;
  label.signs.reserve(windings.size());
  for (double w : windings) {
    label.signs.push_back(w > 0.0 ? +1 : -1);
  }
  return label;
}

std::vector<double> path_windings(std::span<const Vec2> path, std::span<const Obstacle> obstacles)
{
  if (path.size() < 2) {
    throw DomainError("a path needs at least two points");
  }
  auto acc = WindingAccumulator::start_at(path.front(), obstacles.size());
  for (std::size_t k = 1; k < path.size(); ++k) {
    acc = winding_update(std::move(acc), path[k], obstacles);
  }
  return acc.windings;
}

StrategyLabel strategy_label(std::span<const Vec2> path, std::span<const Obstacle> obstacles)
{
  return label_from_windings(path_windings(path, obstacles));
}

std::vector<StrategyLabel> enumerate_strategies(std::size_t obstacle_count)
{
  if (obstacle_count == 0) {
    throw StrategySpaceError("strategy space of an obstacle-free scene is empty");
  }
  if (obstacle_count > kMaxEnumeratedObstacles) {
    throw StrategySpaceError("too many obstacles to enumerate strategies");
  }
  const std::size_t n = std::size_t{1} << obstacle_count;
  std::vector<StrategyLabel> out;
  out.reserve(n);
  for (std::size_t code = 0; code < n; ++code) {
    StrategyLabel label;
    label.signs.resize(obstacle_count);
    // Most significant bit is the first obstacle, so lexicographic order falls out.
    for (std::size_t i = 0; i < obstacle_count; ++i) {
      const bool positive = (code >> (obstacle_count - 1 - i)) & 1U;
      label.signs[i] = positive ? +1 : -1;
    }
    out.push_back(std::move(label));
  }
  return out;
}

}  // namespace collab
