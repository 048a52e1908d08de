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

#ifndef COLLAB__HUMANSIM_HPP_
#define COLLAB__HUMANSIM_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "collab/inference.hpp"
#include "collab/topology.hpp"
#include "collab/workspace.hpp"

namespace collab
{

enum class HumanKind
{
  kCommitted,
  kCompliant,
  kStubborn,
  kNoisyCommitted,
};

std::string to_string(HumanKind kind);
HumanKind parse_human_kind(const std::string & text);

/// Scripted stand-in for a study participant.
///
/// committed: walks along the likelihood mode of its target strategy until the
///   obstacle is passed, then toward the goal. Slows down as the stick closes
///   on an obstacle while the robot pushes toward the other side.
/// stubborn: committed without the slow-down.
/// noisy-committed: committed plus seeded Gaussian velocity noise.
/// compliant: follows the mode of the currently most probable strategy.
struct HumanPolicy
{
  HumanKind kind{HumanKind::kCommitted};
  /// Required by the committed kinds. The empty label is only valid without obstacles.
  std::optional<StrategyLabel> target;
  /// Draw the target per trial from the seed instead of using `target`.
  bool random_target{false};
  double noise_sigma{0.05};
  double speed{0.3};
  /// Stick-to-obstacle clearance (m) below which a committed human starts yielding.
  double yield_clearance{0.25};
  std::uint64_t seed{0};

  bool committed() const {return kind != HumanKind::kCompliant;}

  /// Throws ConfigError on violated invariants.
  void validate(double human_speed_cap) const;
};

/// Human endpoint velocity for the current tick.
///
/// `belief` is the observer's latest posterior (used by compliant humans);
/// `tick` keys the noise stream of noisy humans so the policy stays a value.
Vec2 act(
  const HumanPolicy & policy, const TeamState & state, const Context & c,
  const InferenceParams & params, const StrategyDistribution & belief, std::uint64_t tick);

}  // namespace collab

#endif  // COLLAB__HUMANSIM_HPP_
