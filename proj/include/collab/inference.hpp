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

#ifndef COLLAB__INFERENCE_HPP_
#define COLLAB__INFERENCE_HPP_

#include <numbers>
#include <optional>
#include <vector>

#include "collab/topology.hpp"
#include "collab/workspace.hpp"

namespace collab
{

/// Parameters of the analytical prior and action likelihood.
struct InferenceParams
{
  /// Rationality (s/m). Scales the action/mode dot product inside the exponent.
  double beta{10.0};
  /// |w| (turns) at which an obstacle counts as passed.
  double passed_threshold{0.25};
  /// Offset (rad) of the likelihood mode from the object-to-obstacle direction.
  double approach_angle{std::numbers::pi / 3.0};
  /// Actions slower than this (m/s) carry no information.
  double min_informative_speed{1e-4};

  void validate() const;
};

/// Probability vector over strategies, aligned with enumerate_strategies().
///
/// An obstacle-free context has a single trivial strategy, so its distribution
/// is {1}.
struct StrategyDistribution
{
  std::vector<double> probs;

  /// Index of the most probable strategy; ties go to the lowest index.
  std::size_t argmax() const;

  /// Entry range and unit-sum check (tolerance 1e-9).
  bool is_valid() const;
};

/// Shannon entropy in nats, with 0 log 0 = 0.
double entropy(const StrategyDistribution & d);

/// Single-obstacle prior from the accumulated winding `w`:
/// P(LEFT) = clamp(0.5 - 2w), P(RIGHT) = clamp(0.5 + 2w), renormalized.
StrategyDistribution prior(double w, const InferenceParams & params);

/// Prior over all 2^m strategies as a product of per-obstacle factors.
StrategyDistribution prior(std::span<const double> windings, const InferenceParams & params);

/// Direction of the most likely action under `sign` (-1 LEFT, +1 RIGHT) for
/// obstacle `index`: the object-to-obstacle unit vector rotated by
/// +approach_angle for LEFT and -approach_angle for RIGHT.
Vec2 strategy_mode_direction(
  int sign, std::size_t index, const TeamState & state, const Context & c,
  const InferenceParams & params);

/// Unit vector from the object toward the goal position.
Vec2 goal_direction(const TeamState & state, const Context & c);

/// Index of the obstacle that drives the likelihood: the nearest one whose
/// |w| is below the passed threshold. Empty once every obstacle is passed.
std::optional<std::size_t> active_obstacle(
  const TeamState & state, const Context & c, const InferenceParams & params);

/// Log of the unnormalized likelihood score of velocity `a` under `strategy`.
double log_action_likelihood(
  const Vec2 & a, const StrategyLabel & strategy, const TeamState & state, const Context & c,
  const InferenceParams & params);

/// Unnormalized likelihood score exp(beta * a . mode).
double action_likelihood(
  const Vec2 & a, const StrategyLabel & strategy, const TeamState & state, const Context & c,
  const InferenceParams & params);

/// Posterior over strategies after observing the joint action (human `a`,
/// robot `u`). Normalization runs over strategies.
StrategyDistribution posterior(
  const Vec2 & a, const Vec2 & u, const TeamState & state, const Context & c,
  const InferenceParams & params);

/// Strategy labels matching the distribution layout for context `c`.
std::vector<StrategyLabel> strategy_space(const Context & c);

}  // namespace collab

#endif  // COLLAB__INFERENCE_HPP_
