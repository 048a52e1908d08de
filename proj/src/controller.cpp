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

#include "collab/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "collab/seed.hpp"
#include "collab/topology.hpp"

namespace collab
{

std::string to_string(Algorithm algorithm)
{
  return algorithm == Algorithm::kIcMpc ? "icmpc" : "vanilla";
}

Algorithm parse_algorithm(const std::string & text)
{
  if (text == "icmpc") {
    return Algorithm::kIcMpc;
  }
  if (text == "vanilla") {
    return Algorithm::kVanilla;
  }
  throw ConfigError("unknown algorithm '" + text + "' (expected icmpc or vanilla)");
}

void ControllerConfig::validate() const
{
  if (horizon_steps < 1) {
    throw ConfigError("horizon_steps must be at least 1");
  }
  if (samples < 1) {
    throw ConfigError("samples must be at least 1");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ConfigError("gamma must lie in (0, 1]");
  }
  if (!(rollout_dt > 0.0)) {
    throw ConfigError("rollout_dt must be positive");
  }
  if (!(delta > 0.0)) {
    throw ConfigError("delta must be positive");
  }
  if (!(lambda > 0.0)) {
    throw ConfigError("lambda must be positive");
  }
  if (!(noise_sigma > 0.0)) {
    throw ConfigError("noise_sigma must be positive");
  }
  if (!(speed_cap > 0.0)) {
    throw ConfigError("speed_cap must be positive");
  }
  if (!(w_obs >= 0.0 && w_ent >= 0.0 && heading_weight >= 0.0)) {
    throw ConfigError("cost weights must be non-negative");
  }
  if (threads < 1) {
    throw ConfigError("threads must be at least 1");
  }
}

ControllerConfig ControllerConfig::for_algorithm(Algorithm algorithm)
{
  ControllerConfig config;
  if (algorithm == Algorithm::kVanilla) {
    config.w_ent = 0.0;
  }
  return config;
}

double terminal_cost(const Pose2 & p, const Pose2 & g, double heading_weight)
{
  const double positional = (p.position() - g.position()).squared_norm();
  if (heading_weight == 0.0) {
    return positional;
  }
  const double dh = normalize_angle(p.heading() - g.heading());
  return positional + heading_weight * dh * dh;
}

double obstacle_cost(const TeamState & state, const Context & c, double delta)
{
  if (c.obstacles.empty()) {
    return 0.0;
  }
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto & o : c.obstacles) {
    nearest = std::min(nearest, point_segment_distance(o.center, state.robot_end(), state.human_end()));
  }
  if (nearest == 0.0) {
    return kObstacleCostCap;
  }
  return std::min(std::max(0.0, -std::log(nearest / delta)), kObstacleCostCap);
}

double entropy_cost(
  const TeamState & state, const Vec2 & a_pred, const Vec2 & u, const Context & c,
  const InferenceParams & params)
{
  return entropy(posterior(a_pred, u, state, c, params));
}

Rollout rollout(
  const TeamState & state, std::span<const Vec2> controls, const HumanPrediction & human_pred,
  const Context & c, const ControllerConfig & config, const InferenceParams & params,
  const StickModel & model)
{
  if (controls.size() != config.horizon_steps) {
    throw DomainError("control sequence length differs from the horizon");
  }
  if (human_pred.velocities.size() < controls.size()) {
    throw DomainError("human prediction is shorter than the horizon");
  }
  StickModel rollout_model = model;
  rollout_model.dt = config.rollout_dt;

  Rollout out;
  out.entropy.reserve(controls.size());
  out.obstacle.reserve(controls.size());
  out.states.reserve(controls.size());

  TeamState current = state;
  double discount = 1.0;
  for (std::size_t k = 0; k < controls.size(); ++k) {
    const Vec2 & a = human_pred.velocities[k];
    const double j_ent = entropy_cost(current, a, controls[k], c, params);
    current = step(current, a, controls[k], rollout_model, c);
    const double j_obs = obstacle_cost(current, c, config.delta);
    out.cost += discount * (config.w_obs * j_obs + config.w_ent * j_ent);
    discount *= config.gamma;
    out.entropy.push_back(j_ent);
    out.obstacle.push_back(j_obs);
    out.states.push_back(current);
  }
  out.cost += terminal_cost(current.object(), c.goal, config.heading_weight);
  return out;
}

double rollout_cost(
  const TeamState & state, std::span<const Vec2> controls, const HumanPrediction & human_pred,
  const Context & c, const ControllerConfig & config, const InferenceParams & params,
  const StickModel & model)
{
  return rollout(state, controls, human_pred, c, config, params, model).cost;
}

std::vector<double> softmin_weights(std::span<const double> costs, double lambda)
{
  std::vector<double> weights(costs.size(), 0.0);
  if (costs.empty()) {
    return weights;
  }
  const auto best = std::min_element(costs.begin(), costs.end());
  const double j_min = *best;
  double total = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    weights[i] = std::exp(-(costs[i] - j_min) / lambda);
    total += weights[i];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    std::fill(weights.begin(), weights.end(), 0.0);
    weights[static_cast<std::size_t>(std::distance(costs.begin(), best))] = 1.0;
    return weights;
  }
  for (auto & w : weights) {
    w /= total;
  }
  return weights;
}

std::vector<Vec2> shift_nominal(const Plan & previous, double time, const ControllerConfig & config)
{
  std::vector<Vec2> out(config.horizon_steps);
  if (previous.empty()) {
    return out;
  }
  const auto & prev = previous.controls;
  const double offset = std::max(0.0, (time - previous.time) / config.rollout_dt);
  const std::size_t last = prev.size() - 1;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double pos = static_cast<double>(k) + offset;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo >= last) {
      out[k] = prev[last];
      continue;
    }
    const double frac = pos - static_cast<double>(lo);
    out[k] = prev[lo] * (1.0 - frac) + prev[lo + 1] * frac;
  }
  return out;
}

namespace
{

// Rollouts that hit a degenerate configuration (object exactly on an
// obstacle center) still need a finite, dominated cost.
double guarded_cost(
  const TeamState & state, std::span<const Vec2> controls, const HumanPrediction & human_pred,
  const Context & c, const ControllerConfig & config, const InferenceParams & params,
  const StickModel & model)
{
  try {
    return rollout_cost(state, controls, human_pred, c, config, params, model);
  } catch (const DomainError &) {
  } catch (const SamplingDensityError &) {
  }
  return kObstacleCostCap * static_cast<double>(config.horizon_steps + 1);
}

}  // namespace

Plan plan(
  const TeamState & state, const Context & c, std::span<const Vec2> human_history,
  const Plan & nominal, const ControllerConfig & config, const InferenceParams & params,
  const StickModel & model)
{
  const std::size_t horizon = config.horizon_steps;
  const std::size_t samples = config.samples;
  const std::uint64_t iteration = nominal.iteration + 1;

  const std::vector<Vec2> base = shift_nominal(nominal, state.time(), config);
  const HumanPrediction human_pred = predict_human(human_history, horizon, model);

  std::vector<Vec2> sampled(samples * horizon);
  std::vector<double> costs(samples, 0.0);

  // Sample 0 is the unperturbed nominal; every other sample owns a noise
  // stream keyed by (seed, iteration, sample), so any partition of the work
  // across threads yields the same plan.
  auto evaluate = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        std::span<Vec2> seq(sampled.data() + i * horizon, horizon);
        if (i == 0) {
          for (std::size_t k = 0; k < horizon; ++k) {
            seq[k] = base[k].clamped(config.speed_cap);
          }
        } else {
          std::mt19937_64 rng(mix_seed(config.seed, {iteration, i}));
          std::normal_distribution<double> noise(0.0, config.noise_sigma);
          for (std::size_t k = 0; k < horizon; ++k) {
            const double nx = noise(rng);
            const double ny = noise(rng);
            seq[k] = (base[k] + Vec2(nx, ny)).clamped(config.speed_cap);
          }
        }
        costs[i] = guarded_cost(state, seq, human_pred, c, config, params, model);
      }
    };

  const std::size_t workers = std::min(config.threads, samples);
  if (workers <= 1) {
    evaluate(0, samples);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (samples + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(samples, begin + chunk);
      if (begin < end) {
        pool.emplace_back(evaluate, begin, end);
      }
    }
  }

  const std::vector<double> weights = softmin_weights(costs, config.lambda);

  Plan out;
  out.iteration = iteration;
  out.time = state.time();
  out.controls.assign(horizon, Vec2{});
  for (std::size_t k = 0; k < horizon; ++k) {
    double x = 0.0;
    double y = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      x += weights[i] * sampled[i * horizon + k].x();
      y += weights[i] * sampled[i * horizon + k].y();
    }
    // A convex combination stays in the speed disk up to rounding; clamp the rounding away.
    out.controls[k] = Vec2(x, y).clamped(config.speed_cap);
  }

  try {
    const Rollout r = rollout(state, out.controls, human_pred, c, config, params, model);
    out.expected_cost = r.cost;
    out.entropy_trace = r.entropy;
    out.obstacle_trace = r.obstacle;
    out.path.reserve(r.states.size());
    for (const auto & s : r.states) {
      out.path.push_back(s.object().position());
    }
  } catch (const DomainError &) {
    out.expected_cost = kObstacleCostCap * static_cast<double>(horizon + 1);
  } catch (const SamplingDensityError &) {
    out.expected_cost = kObstacleCostCap * static_cast<double>(horizon + 1);
  }
  return out;
}

}  // namespace collab
