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

#ifndef COLLAB__CONTROLLER_HPP_
#define COLLAB__CONTROLLER_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "collab/dynamics.hpp"
#include "collab/inference.hpp"
#include "collab/workspace.hpp"

namespace collab
{

/// Robot controller variant. Vanilla is the same MPPI with the entropy weight at zero.
enum class Algorithm
{
  kIcMpc,
  kVanilla,
};

std::string to_string(Algorithm algorithm);
/// Accepts "icmpc" and "vanilla"; throws ConfigError otherwise.
Algorithm parse_algorithm(const std::string & text);

/// Obstacle cost returned when the stick passes exactly through an obstacle center.
inline constexpr double kObstacleCostCap = 1e6;

struct ControllerConfig
{
  std::size_t horizon_steps{15};
  double rollout_dt{0.25};
  std::size_t samples{100};
  double gamma{0.95};
  double w_obs{1.0};
  double w_ent{1.0};
  /// Obstacle clearance threshold (m).
  double delta{0.5};
  /// MPPI temperature.
  double lambda{0.1};
  /// Std. dev. of the per-component control perturbation (m/s).
  double noise_sigma{0.15};
  double speed_cap{0.3};
  /// Weight on squared heading error in the terminal cost. Zero keeps it positional.
  double heading_weight{0.0};
  std::uint64_t seed{0};
  /// Worker threads for rollout evaluation; results do not depend on it.
  std::size_t threads{1};

  void validate() const;

  /// Study parameters for the given variant.
  static ControllerConfig for_algorithm(Algorithm algorithm);
};

/// Output of one MPPI iteration.
struct Plan
{
  std::vector<Vec2> controls;
  /// Discounted cost of `controls` from the planning state.
  double expected_cost{0.0};
  /// Per-step entropy and obstacle costs along the planned rollout.
  std::vector<double> entropy_trace;
  std::vector<double> obstacle_trace;
  /// Planned object positions, one per rollout step.
  std::vector<Vec2> path;
  /// State time at which the plan was made.
  double time{0.0};
  /// Index of the MPPI iteration that produced the plan; selects its noise stream.
  std::uint64_t iteration{0};

  bool empty() const {return controls.empty();}
};

/// Per-step trace of a rollout.
struct Rollout
{
  double cost{0.0};
  std::vector<double> entropy;
  std::vector<double> obstacle;
  std::vector<TeamState> states;
};

/// Squared positional distance to the goal, plus an optional heading term.
double terminal_cost(const Pose2 & p, const Pose2 & g, double heading_weight = 0.0);

/// Log-barrier on the smallest stick-to-obstacle-center distance d:
/// max(0, -log(d / delta)), capped at kObstacleCostCap when d = 0.
double obstacle_cost(const TeamState & state, const Context & c, double delta);

/// Entropy of the posterior the partner would hold after the joint action.
double entropy_cost(
  const TeamState & state, const Vec2 & a_pred, const Vec2 & u, const Context & c,
  const InferenceParams & params);

/// Simulates `controls` against the predicted human velocities and accumulates
/// sum_k gamma^k (w_obs J_obs + w_ent J_ent) plus the terminal cost.
/// `model.dt` is replaced by the config's rollout_dt.
Rollout rollout(
  const TeamState & state, std::span<const Vec2> controls, const HumanPrediction & human_pred,
  const Context & c, const ControllerConfig & config, const InferenceParams & params,
  const StickModel & model);

double rollout_cost(
  const TeamState & state, std::span<const Vec2> controls, const HumanPrediction & human_pred,
  const Context & c, const ControllerConfig & config, const InferenceParams & params,
  const StickModel & model);

/// Normalized weights exp(-(J - J_min) / lambda).
std::vector<double> softmin_weights(std::span<const double> costs, double lambda);

/// Nominal sequence for the next iteration: `previous` advanced to `time`
/// by linear interpolation, holding the last control.
std::vector<Vec2> shift_nominal(const Plan & previous, double time, const ControllerConfig & config);

/// One MPPI iteration around `nominal` (time-shifted). Deterministic in
/// (config.seed, nominal.iteration + 1) regardless of config.threads.
Plan plan(
  const TeamState & state, const Context & c, std::span<const Vec2> human_history,
  const Plan & nominal, const ControllerConfig & config, const InferenceParams & params,
  const StickModel & model);

}  // namespace collab

#endif  // COLLAB__CONTROLLER_HPP_
