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

#include "collab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "collab/seed.hpp"

namespace collab
{

namespace
{

// Human velocities reach the controller at 10 Hz while the loop ticks at 15 Hz.
constexpr std::int64_t kObserverHz = 10;
constexpr std::int64_t kLoopHz = 15;

}  // namespace

std::string to_string(StartConfig start)
{
  switch (start) {
    case StartConfig::kSideBySide: return "side-by-side";
    case StartConfig::kHumanBehind: return "human-behind";
    case StartConfig::kHumanInFront: return "human-in-front";
  }
  return "side-by-side";
}

StartConfig parse_start_config(const std::string & text)
{
  if (text == "side-by-side") {
    return StartConfig::kSideBySide;
  }
  if (text == "human-behind") {
    return StartConfig::kHumanBehind;
  }
  if (text == "human-in-front") {
    return StartConfig::kHumanInFront;
  }
  throw ConfigError("unknown start configuration '" + text + "'");
}

double start_heading(StartConfig start, const Vec2 & travel_direction)
{
  const double travel = std::atan2(travel_direction.y(), travel_direction.x());
  switch (start) {
    case StartConfig::kSideBySide: return normalize_angle(travel - std::numbers::pi / 2.0);
    case StartConfig::kHumanBehind: return normalize_angle(travel + std::numbers::pi);
    case StartConfig::kHumanInFront: return normalize_angle(travel);
  }
  return travel;
}

std::string to_string(Outcome outcome)
{
  switch (outcome) {
    case Outcome::kRunning: return "running";
    case Outcome::kSuccess: return "success";
    case Outcome::kCollision: return "collision";
    case Outcome::kOutOfBounds: return "out-of-bounds";
    case Outcome::kTimeout: return "timeout";
  }
  return "running";
}

Outcome parse_outcome(const std::string & text)
{
  for (auto o : {Outcome::kRunning, Outcome::kSuccess, Outcome::kCollision,
      Outcome::kOutOfBounds, Outcome::kTimeout})
  {
    if (to_string(o) == text) {
      return o;
    }
  }
  throw ConfigError("unknown outcome '" + text + "'");
}

void TrialConfig::validate() const
{
  context.validate();
  controller.validate();
  inference.validate();
  model.validate();
  human.validate(model.human_speed_cap);
  if (!(timeout > 0.0)) {
    throw ConfigError("timeout must be positive");
  }
  if (std::abs(model.length - context.stick_length) > 1e-12) {
    throw ConfigError("model stick length differs from the context stick length");
  }
  if (human.target && !human.random_target &&
    human.target->signs.size() != context.obstacles.size())
  {
    throw ConfigError("human target strategy does not match the obstacle count");
  }
  if (const auto * s = std::get_if<TeamState>(&start)) {
    if (s->windings().size() != context.obstacles.size()) {
      throw ConfigError("start state windings do not match the obstacle count");
    }
    if (std::abs((s->human_end() - s->robot_end()).norm() - model.length) >
      TeamState::kRigidityTolerance)
    {
      throw ConfigError("start state does not match the stick length");
    }
  } else if (!context.bounds.contains(start_position)) {
    throw ConfigError("start position lies outside the workspace bounds");
  }
}

TrialConfig TrialConfig::resolved() const
{
  TrialConfig out = *this;
  out.controller.seed = mix_seed(seed, {fnv1a("controller")});
  out.human.seed = mix_seed(seed, {fnv1a("human")});
  if (out.human.random_target) {
    const auto labels = strategy_space(context);
    out.human.target = labels[mix_seed(seed, {fnv1a("target")}) % labels.size()];
    out.human.random_target = false;
  }
  if (algorithm == Algorithm::kVanilla) {
    out.controller.w_ent = 0.0;
  }
  return out;
}

TeamState initial_state(const TrialConfig & config)
{
  if (const auto * s = std::get_if<TeamState>(&config.start)) {
    return *s;
  }
  const auto start = std::get<StartConfig>(config.start);
  const Vec2 travel = config.context.goal.position() - config.start_position;
  const Vec2 direction = travel.squared_norm() > 0.0 ? travel : Vec2(0.0, 1.0);
  const Pose2 pose(config.start_position, start_heading(start, direction));
  return TeamState::from_pose(
    pose, config.model.length, Vec2{}, Vec2{},
    std::vector<double>(config.context.obstacles.size(), 0.0), 0.0);
}

Outcome adjudicate(const TeamState & state, const Context & c, double timeout)
{
  for (const auto & o : c.obstacles) {
    if (segment_square_distance(state.robot_end(), state.human_end(), o) <= 0.0) {
      return Outcome::kCollision;
    }
  }
  if (!c.bounds.contains(state.human_end()) || !c.bounds.contains(state.robot_end())) {
    return Outcome::kOutOfBounds;
  }
  const Vec2 & g = c.goal.position();
  const double reach = std::min(
    {(state.object().position() - g).norm(), (state.human_end() - g).norm(),
      (state.robot_end() - g).norm()});
  if (reach <= c.goal_radius) {
    return Outcome::kSuccess;
  }
  // Ticks accumulate dt in floating point; allow for the rounding.
  if (state.time() >= timeout - 1e-9) {
    return Outcome::kTimeout;
  }
  return Outcome::kRunning;
}

TrialRunner::TrialRunner(const TrialConfig & config)
{
  config.validate();
  log_.config = config.resolved();
  state_ = initial_state(log_.config);
  belief_ = prior(state_.windings(), log_.config.inference);
}

void TrialRunner::observe_human()
{
  const auto sample = static_cast<std::int64_t>(tick_) * kObserverHz / kLoopHz;
  if (sample > last_observation_) {
    human_history_.push_back(state_.human_vel());
    last_observation_ = sample;
  }
}

Vec2 TrialRunner::scripted_action() const
{
  const auto & cfg = log_.config;
  return act(cfg.human, state_, cfg.context, cfg.inference, belief_, tick_);
}

const TickRecord & TrialRunner::advance(const Vec2 & human_action)
{
  if (finished()) {
    throw std::logic_error("trial already finished");
  }
  const auto & cfg = log_.config;
  observe_human();
  plan_ = plan(state_, cfg.context, human_history_, plan_, cfg.controller, cfg.inference, cfg.model);

  TickRecord rec;
  rec.state = state_;
  rec.a = human_action.clamped(cfg.model.human_speed_cap);
  rec.u = plan_.controls.front();
  rec.posterior = posterior(rec.a, rec.u, state_, cfg.context, cfg.inference);
  rec.entropy = entropy(rec.posterior);
  rec.j_obs = obstacle_cost(state_, cfg.context, cfg.controller.delta);
  rec.j_ent = plan_.entropy_trace.empty() ? 0.0 : plan_.entropy_trace.front();
  belief_ = rec.posterior;

  try {
    state_ = step(state_, rec.a, rec.u, cfg.model, cfg.context);
    log_.outcome = adjudicate(state_, cfg.context, cfg.timeout);
  } catch (const DomainError &) {
    // Only reachable with the midpoint exactly on an obstacle center.
    log_.outcome = Outcome::kCollision;
  } catch (const SamplingDensityError &) {
    log_.outcome = Outcome::kCollision;
  }
  ++tick_;
  log_.ticks.push_back(std::move(rec));
  if (finished()) {
    log_.final_state = state_;
    log_.final_label = label_from_windings(state_.windings());
  }
  return log_.ticks.back();
}

TrialLog run_trial(const TrialConfig & config)
{
  TrialRunner runner(config);
  while (!runner.finished()) {
    runner.advance(runner.scripted_action());
  }
  return runner.take_log();
}

namespace
{

double state_error(const TeamState & a, const TeamState & b)
{
  double err = 0.0;
  auto acc = [&err](double x, double y) {err = std::max(err, std::abs(x - y));};
  acc(a.object().position().x(), b.object().position().x());
  acc(a.object().position().y(), b.object().position().y());
  acc(normalize_angle(a.object().heading() - b.object().heading()), 0.0);
  acc(a.human_end().x(), b.human_end().x());
  acc(a.human_end().y(), b.human_end().y());
  acc(a.robot_end().x(), b.robot_end().x());
  acc(a.robot_end().y(), b.robot_end().y());
  acc(a.time(), b.time());
  if (a.windings().size() != b.windings().size()) {
    return std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = 0; i < a.windings().size(); ++i) {
    acc(a.windings()[i], b.windings()[i]);
  }
  return err;
}

}  // namespace

ReplayCheck verify_log(const TrialLog & log, double tolerance)
{
  ReplayCheck check;
  const auto & cfg = log.config;
  TeamState replay = initial_state(cfg);
  auto note = [&](std::size_t tick, double err) {
      check.max_error = std::max(check.max_error, err);
      if (!(err <= tolerance) && !check.mismatch_tick) {
        check.ok = false;
        check.mismatch_tick = tick;
      }
    };
  for (std::size_t i = 0; i < log.ticks.size(); ++i) {
    const auto & rec = log.ticks[i];
    note(i, state_error(replay, rec.state));
    try {
      replay = step(replay, rec.a, rec.u, cfg.model, cfg.context);
    } catch (const std::exception &) {
      check.ok = false;
      if (!check.mismatch_tick) {
        check.mismatch_tick = i;
      }
      return check;
    }
  }
  if (log.outcome != Outcome::kRunning) {
    note(log.ticks.size(), state_error(replay, log.final_state));
    if (label_from_windings(log.final_state.windings()) != log.final_label) {
      check.ok = false;
      if (!check.mismatch_tick) {
        check.mismatch_tick = log.ticks.size();
      }
    }
  }
  return check;
}

double mean_human_acceleration(const TrialLog & log)
{
  const auto & ticks = log.ticks;
  if (ticks.size() < 2) {
    return 0.0;
  }
  const double t0 = ticks.front().state.time();
  const double t1 = ticks.back().state.time();
  constexpr double period = 1.0 / static_cast<double>(kObserverHz);
  const auto samples = static_cast<std::size_t>(std::floor((t1 - t0) / period + 1e-9)) + 1;
  if (samples < 2) {
    return 0.0;
  }
  // Per-tick human velocity, linearly interpolated onto the 10 Hz grid.
  std::vector<Vec2> grid;
  grid.reserve(samples);
  std::size_t j = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double t = t0 + static_cast<double>(s) * period;
    while (j + 1 < ticks.size() - 1 && ticks[j + 1].state.time() <= t) {
      ++j;
    }
    const double ta = ticks[j].state.time();
    const double tb = ticks[j + 1].state.time();
    const double f = std::clamp((t - ta) / (tb - ta), 0.0, 1.0);
    grid.push_back(ticks[j].a * (1.0 - f) + ticks[j + 1].a * f);
  }
  double total = 0.0;
  for (std::size_t s = 1; s < grid.size(); ++s) {
    total += (grid[s] - grid[s - 1]).norm() / period;
  }
  return total / static_cast<double>(grid.size() - 1);
}

std::vector<double> resample_entropy(const TrialLog & log)
{
  std::vector<double> out(kTraceBins, 0.0);
  const auto & ticks = log.ticks;
  if (ticks.empty()) {
    return out;
  }
  if (ticks.size() == 1) {
    std::fill(out.begin(), out.end(), ticks.front().entropy);
    return out;
  }
  const double last = static_cast<double>(ticks.size() - 1);
  for (std::size_t b = 0; b < kTraceBins; ++b) {
    const double tau = (static_cast<double>(b) + 0.5) / static_cast<double>(kTraceBins);
    const double pos = tau * last;
    const auto lo = std::min(static_cast<std::size_t>(std::floor(pos)), ticks.size() - 2);
    const double f = pos - static_cast<double>(lo);
    out[b] = ticks[lo].entropy * (1.0 - f) + ticks[lo + 1].entropy * f;
  }
  return out;
}

namespace
{

std::pair<double, double> mean_sd(const std::vector<double> & xs)
{
  if (xs.empty()) {
    return {0.0, 0.0};
  }
  double mean = 0.0;
  for (double x : xs) {
    mean += x;
  }
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) {
    return {mean, 0.0};
  }
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

}  // namespace

MetricsReport compute_metrics(std::span<const TrialLog> logs)
{
  if (logs.empty()) {
    throw std::invalid_argument("compute_metrics needs at least one trial log");
  }
  MetricsReport r;
  r.trials = logs.size();
  r.entropy_trace.assign(kTraceBins, 0.0);
  std::vector<double> times;
  std::vector<double> accels;
  for (const auto & log : logs) {
    ++r.outcomes[to_string(log.outcome)];
    ++r.strategy_split[log.final_label.name()];
    const auto trace = resample_entropy(log);
    for (std::size_t b = 0; b < kTraceBins; ++b) {
      r.entropy_trace[b] += trace[b];
    }
    if (log.outcome == Outcome::kSuccess) {
      ++r.successes;
      times.push_back(log.final_state.time());
      accels.push_back(mean_human_acceleration(log));
    }
  }
  for (auto & e : r.entropy_trace) {
    e /= static_cast<double>(logs.size());
  }
  r.success_rate = static_cast<double>(r.successes) / static_cast<double>(r.trials);
  std::tie(r.completion_time_mean, r.completion_time_sd) = mean_sd(times);
  std::tie(r.acceleration_mean, r.acceleration_sd) = mean_sd(accels);
  return r;
}

std::string render_table(const std::map<std::string, MetricsReport> & reports)
{
  std::ostringstream os;
  os << std::left << std::setw(12) << "algorithm" << std::right
     << std::setw(8) << "trials" << std::setw(14) << "success (%)"
     << std::setw(22) << "completion time (s)" << std::setw(22) << "acceleration (m/s2)"
     << std::setw(14) << "H@50% (nats)" << '\n';
  os << std::fixed;
  for (const auto & [name, r] : reports) {
    std::ostringstream time;
    std::ostringstream accel;
    time << std::fixed << std::setprecision(2) << r.completion_time_mean << " (" <<
      r.completion_time_sd << ")";
    accel << std::fixed << std::setprecision(2) << r.acceleration_mean << " (" <<
      r.acceleration_sd << ")";
    os << std::left << std::setw(12) << name << std::right
       << std::setw(8) << r.trials
       << std::setw(14) << std::setprecision(1) << 100.0 * r.success_rate
       << std::setw(22) << time.str() << std::setw(22) << accel.str()
       << std::setw(14) << std::setprecision(4) << r.entropy_trace[kTraceBins / 2] << '\n';
  }
  return os.str();
}

}  // namespace collab
