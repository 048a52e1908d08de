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

#ifndef COLLAB__TOPOLOGY_HPP_
#define COLLAB__TOPOLOGY_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "collab/workspace.hpp"

namespace collab
{

/// A single path step swept half a turn or more around some obstacle, so the
/// principal-value angle can no longer be trusted.
class SamplingDensityError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Requested strategy space is empty or too large to enumerate.
class StrategySpaceError : public std::length_error
{
public:
  using std::length_error::length_error;
};

inline constexpr std::size_t kMaxEnumeratedObstacles = 16;

/// Passing side per obstacle: -1 (negative winding, LEFT) or +1 (positive, RIGHT).
struct StrategyLabel
{
  std::vector<std::int8_t> signs;

  bool operator==(const StrategyLabel &) const = default;
  auto operator<=>(const StrategyLabel &) const = default;

  static StrategyLabel left() {return StrategyLabel{{-1}};}
  static StrategyLabel right() {return StrategyLabel{{+1}};}

  /// "LEFT"/"RIGHT" for one obstacle, otherwise a sign string such as "+-".
  /// The empty label (obstacle-free scene) renders as "NONE".
  std::string name() const;

  /// Inverse of name(); throws ConfigError on malformed text.
  static StrategyLabel parse(const std::string & text);
};

/// Running winding numbers (in turns) of the object path around each obstacle center.
struct WindingAccumulator
{
  std::vector<double> windings;
  Vec2 last;

  /// Fresh accumulator at `start` with all windings zero.
  static WindingAccumulator start_at(const Vec2 & start, std::size_t obstacle_count)
  {
    return WindingAccumulator{std::vector<double>(obstacle_count, 0.0), start};
  }
};

/// Adds the signed angular displacement (in turns) of the move last -> p_new
/// about every obstacle center.
///
/// Throws DomainError if p_new or the previous point sits on an obstacle
/// center and SamplingDensityError if any per-step increment reaches 0.5 turns.
WindingAccumulator winding_update(
  WindingAccumulator acc, const Vec2 & p_new, std::span<const Obstacle> obstacles);

/// Componentwise sign of the windings, with sign(0) resolved as -1.
StrategyLabel label_from_windings(std::span<const double> windings);

/// Accumulated windings of a polyline, one per obstacle.
std::vector<double> path_windings(std::span<const Vec2> path, std::span<const Obstacle> obstacles);

/// Homotopy-class label of a densely sampled path (at least two points).
StrategyLabel strategy_label(std::span<const Vec2> path, std::span<const Obstacle> obstacles);

/// All 2^m sign tuples, lexicographic with -1 < +1.
std::vector<StrategyLabel> enumerate_strategies(std::size_t obstacle_count);

}  // namespace collab

#endif  // COLLAB__TOPOLOGY_HPP_
