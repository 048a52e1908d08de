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

#ifndef COLLAB__HARNESS_HPP_
#define COLLAB__HARNESS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "collab/controller.hpp"
#include "collab/dynamics.hpp"
#include "collab/humansim.hpp"
#include "collab/inference.hpp"
#include "collab/topology.hpp"
#include "collab/workspace.hpp"

namespace collab
{

/// The three study starting configurations. Side-by-side puts the human on the
/// +x side of a stick across the direction of travel; the other two align the
/// stick with it, the human behind or ahead of the robot.
enum class StartConfig
{
  kSideBySide,
  kHumanBehind,
  kHumanInFront,
};

std::string to_string(StartConfig start);
StartConfig parse_start_config(const std::string & text);

/// Heading of the robot-to-human vector for a start configuration, given the
/// direction of travel.
double start_heading(StartConfig start, const Vec2 & travel_direction);

enum class Outcome
{
  kRunning,
  kSuccess,
  kCollision,
  kOutOfBounds,
  kTimeout,
};

std::string to_string(Outcome outcome);
Outcome parse_outcome(const std::string & text);

/// Everything that defines one closed-loop trial.
struct TrialConfig
{
  Context context;
  std::variant<StartConfig, TeamState> start{StartConfig::kSideBySide};
  /// Object midpoint at t = 0 for the named start configurations.
  Vec2 start_position{0.0, -2.2};
  Algorithm algorithm{Algorithm::kIcMpc};
  HumanPolicy human;
  ControllerConfig controller;
  InferenceParams inference;
  StickModel model;
  double timeout{90.0};
  std::uint64_t seed{0};

  /// Throws ConfigError on any invalid field.
  void validate() const;

  /// Copy with per-trial randomness fixed: controller and human seeds derived
  /// from `seed`, random human targets drawn, entropy weight zeroed for vanilla.
  TrialConfig resolved() const;
};

/// Initial team state implied by the config.
TeamState initial_state(const TrialConfig & config);

/// One 15 Hz tick: the state before the step, the executed joint action and
/// the observer's view of it.
struct TickRecord
{
  TeamState state;
  Vec2 a;
  Vec2 u;
  StrategyDistribution posterior;
  double entropy{0.0};
  /// Obstacle cost of `state`.
  double j_obs{0.0};
  /// Entropy term of the controller's plan at its first step.
  double j_ent{0.0};
};

struct TrialLog
{
  TrialConfig config;
  std::vector<TickRecord> ticks;
  Outcome outcome{Outcome::kRunning};
  TeamState final_state;
  StrategyLabel final_label;
};

/// Terminal test applied after every step. Collision is checked against the
/// obstacle squares, then bounds, then the goal disk, then the timeout.
Outcome adjudicate(const TeamState & state, const Context & c, double timeout);

/// Closed-loop trial that advances one tick at a time. The human action is
/// supplied by the caller, so the same loop serves scripted and live partners.
class TrialRunner
{
public:
  explicit TrialRunner(const TrialConfig & config);

  const TrialConfig & config() const {return log_.config;}
  const TeamState & state() const {return state_;}
  bool finished() const {return log_.outcome != Outcome::kRunning;}
  Outcome outcome() const {return log_.outcome;}
  const Plan & last_plan() const {return plan_;}
  const StrategyDistribution & belief() const {return belief_;}
  std::uint64_t tick_index() const {return tick_;}

  /// Action of the configured simulated human for the current state.
  Vec2 scripted_action() const;

  /// Plans, steps and adjudicates; returns the recorded tick.
  /// Throws std::logic_error once the trial has finished.
  const TickRecord & advance(const Vec2 & human_action);

  const TrialLog & log() const {return log_;}
  TrialLog take_log() {return std::move(log_);}

private:
  void observe_human();

  TrialLog log_;
  TeamState state_;
  Plan plan_;
  StrategyDistribution belief_;
  std::vector<Vec2> human_history_;
  std::uint64_t tick_{0};
  std::int64_t last_observation_{-1};
};

/// Runs a trial to completion against the configured simulated human.
TrialLog run_trial(const TrialConfig & config);

/// Result of re-simulating a log through the dynamics.
struct ReplayCheck
{
  bool ok{true};
  /// First tick whose recorded state disagrees; ticks.size() means the final state.
  std::optional<std::size_t> mismatch_tick;
  double max_error{0.0};
};

/// Replays the recorded joint actions from the configured start and compares
/// every recorded state within `tolerance`.
ReplayCheck verify_log(const TrialLog & log, double tolerance = 1e-9);

inline constexpr std::size_t kTraceBins = 100;

struct MetricsReport
{
  std::size_t trials{0};
  std::size_t successes{0};
  double success_rate{0.0};
  double completion_time_mean{0.0};
  double completion_time_sd{0.0};
  double acceleration_mean{0.0};
  double acceleration_sd{0.0};
  /// Mean posterior entropy over normalized time, bin j centered at (j + 0.5) / 100.
  std::vector<double> entropy_trace;
  std::map<std::string, std::size_t> strategy_split;
  std::map<std::string, std::size_t> outcomes;
};

/// Mean magnitude of the finite-difference human acceleration on a 10 Hz grid.
double mean_human_acceleration(const TrialLog & log);

/// Linear resampling of the per-tick entropy onto kTraceBins bins.
std::vector<double> resample_entropy(const TrialLog & log);

/// Aggregates logs; throws std::invalid_argument on empty input.
MetricsReport compute_metrics(std::span<const TrialLog> logs);

/// Aligned text table, one row per group.
std::string render_table(const std::map<std::string, MetricsReport> & reports);

}  // namespace collab

#endif  // COLLAB__HARNESS_HPP_
