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

#include "collab/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace collab
{

namespace
{

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Sign of obstacle `i` in the strategy with enumeration index `code` (m obstacles).
int sign_of(std::size_t code, std::size_t i, std::size_t m)
{
  return ((code >> (m - 1 - i)) & 1U) ? +1 : -1;
}

std::size_t strategy_count(std::size_t m)
{
  if (m > kMaxEnumeratedObstacles) {
    throw StrategySpaceError("too many obstacles to enumerate strategies");
  }
  return std::size_t{1} << m;
}

std::pair<double, double> binary_prior(double w)
{
  double left = std::clamp(0.5 - 2.0 * w, 0.0, 1.0);
  double right = std::clamp(0.5 + 2.0 * w, 0.0, 1.0);
  const double total = left + right;
  if (total != 1.0) {
    left /= total;
    right /= total;
  }
  return {left, right};
}

// beta * a . mode for strategy `code`; shared by the label and index paths.
double log_score(
  const Vec2 & a, std::size_t code, std::size_t m, const TeamState & state, const Context & c,
  const InferenceParams & params)
{
  if (a.norm() < params.min_informative_speed) {
    return 0.0;
  }
  const auto active = active_obstacle(state, c, params);
  const Vec2 mode = active ?
    strategy_mode_direction(sign_of(code, *active, m), *active, state, c, params) :
    goal_direction(state, c);
  return params.beta * a.dot(mode);
}

std::size_t code_of(const StrategyLabel & strategy, std::size_t m)
{
  if (strategy.signs.size() != m) {
    throw DomainError("strategy label does not match the obstacle count");
  }
  std::size_t code = 0;
  for (auto s : strategy.signs) {
    code = (code << 1U) | (s > 0 ? 1U : 0U);
  }
  return code;
}

}  // namespace

void InferenceParams::validate() const
{
  if (!(beta > 0.0)) {
    throw ConfigError("inference beta must be positive");
  }
  if (!(passed_threshold > 0.0)) {
    throw ConfigError("passed_threshold must be positive");
  }
  if (!(approach_angle > 0.0 && approach_angle < std::numbers::pi / 2.0)) {
    throw ConfigError("approach_angle must lie in (0, pi/2)");
  }
  if (!(min_informative_speed >= 0.0)) {
    throw ConfigError("min_informative_speed must be non-negative");
  }
}

std::size_t StrategyDistribution::argmax() const
{
  return static_cast<std::size_t>(std::distance(
           probs.begin(), std::max_element(probs.begin(), probs.end())));
}

bool StrategyDistribution::is_valid() const
{
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      return false;
    }
    total += p;
  }
  return !probs.empty() && std::abs(total - 1.0) <= 1e-9;
}

double entropy(const StrategyDistribution & d)
{
  double h = 0.0;
  for (double p : d.probs) {
    if (p > 0.0) {
      h -= p * std::log(p);
    }
  }
  return h;
}

StrategyDistribution prior(double w, const InferenceParams &)
{
  const auto [left, right] = binary_prior(w);
  return StrategyDistribution{{left, right}};
}

StrategyDistribution prior(std::span<const double> windings, const InferenceParams & params)
{
  const std::size_t m = windings.size();
  if (m == 0) {
    return StrategyDistribution{{1.0}};
  }
  if (m == 1) {
    return prior(windings[0], params);
  }
  const std::size_t n = strategy_count(m);
  StrategyDistribution d;
  d.probs.assign(n, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto [left, right] = binary_prior(windings[i]);
    for (std::size_t code = 0; code < n; ++code) {
      d.probs[code] *= sign_of(code, i, m) < 0 ? left : right;
    }
  }
  return d;
}

Vec2 strategy_mode_direction(
  int sign, std::size_t index, const TeamState & state, const Context & c,
  const InferenceParams & params)
{
  const Vec2 to_obstacle = (c.obstacles.at(index).center - state.object().position()).normalized();
  const double cs = std::cos(params.approach_angle);
  const double sn = std::sin(params.approach_angle);
  // LEFT rotates counterclockwise, RIGHT clockwise; same (cs, sn) keeps the two mirror-exact.
  return sign < 0 ? to_obstacle.rotated(cs, sn) : to_obstacle.rotated(cs, -sn);
}

Vec2 goal_direction(const TeamState & state, const Context & c)
{
  return (c.goal.position() - state.object().position()).normalized();
}

std::optional<std::size_t> active_obstacle(
  const TeamState & state, const Context & c, const InferenceParams & params)
{
  const auto & w = state.windings();
  if (w.size() != c.obstacles.size()) {
    throw DomainError("state windings do not match the obstacle count");
  }
  std::optional<std::size_t> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (std::abs(w[i]) >= params.passed_threshold) {
      continue;
    }
    const double d2 = (c.obstacles[i].center - state.object().position()).squared_norm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

double log_action_likelihood(
  const Vec2 & a, const StrategyLabel & strategy, const TeamState & state, const Context & c,
  const InferenceParams & params)
{
  const std::size_t m = c.obstacles.size();
  return log_score(a, code_of(strategy, m), m, state, c, params);
}

double action_likelihood(
  const Vec2 & a, const StrategyLabel & strategy, const TeamState & state, const Context & c,
  const InferenceParams & params)
{
  return std::exp(log_action_likelihood(a, strategy, state, c, params));
}

StrategyDistribution posterior(
  const Vec2 & a, const Vec2 & u, const TeamState & state, const Context & c,
  const InferenceParams & params)
{
  const std::size_t m = c.obstacles.size();
  if (m == 0) {
    return StrategyDistribution{{1.0}};
  }
  const StrategyDistribution pri = prior(state.windings(), params);
  const std::size_t n = pri.probs.size();

  std::vector<double> log_mass(n);
  double peak = kNegInf;
  for (std::size_t code = 0; code < n; ++code) {
    if (pri.probs[code] == 0.0) {
      log_mass[code] = kNegInf;
      continue;
    }
    log_mass[code] = log_score(a, code, m, state, c, params) +
      log_score(u, code, m, state, c, params) + std::log(pri.probs[code]);
    peak = std::max(peak, log_mass[code]);
  }
  if (peak == kNegInf) {
    throw std::logic_error("posterior has no mass on any strategy");
  }

  StrategyDistribution d;
  d.probs.resize(n);
  double total = 0.0;
  for (std::size_t code = 0; code < n; ++code) {
    d.probs[code] = log_mass[code] == kNegInf ? 0.0 : std::exp(log_mass[code] - peak);
    total += d.probs[code];
  }
  for (auto & p : d.probs) {
    p /= total;
  }
  return d;
}

std::vector<StrategyLabel> strategy_space(const Context & c)
{
  if (c.obstacles.empty()) {
    return {StrategyLabel{}};
  }
  return enumerate_strategies(c.obstacles.size());
}

}  // namespace collab
