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

#include "collab/workspace.hpp"

#include <algorithm>
#include <array>

namespace collab
{

Vec2 Vec2::normalized() const
{
  const double n = norm();
  if (n == 0.0) {
    throw DomainError("cannot normalize the zero vector");
  }
  return *this / n;
}

Vec2 Vec2::clamped(double cap) const
{
  const double n = norm();
  if (n <= cap) {
    return *this;
  }
  // cap / n can round up; step the scale down until the result is within the cap.
  double scale = cap / n;
  Vec2 out = *this * scale;
  while (out.norm() > cap) {
    scale = std::nextafter(scale, 0.0);
    out = *this * scale;
  }
  return out;
}

double normalize_angle(double angle)
{
  if (!std::isfinite(angle)) {
    throw DomainError("angle must be finite");
  }
  constexpr double pi = std::numbers::pi;
  double a = std::remainder(angle, 2.0 * pi);
  if (a <= -pi) {
    a += 2.0 * pi;
  }
  return a;
}

Pose2::Pose2(Vec2 position, double heading)
: position_(position), heading_(normalize_angle(heading))
{
}

void Context::validate() const
{
  if (!(stick_length > 0.0)) {
    throw ConfigError("stick_length must be positive");
  }
  if (!(goal_radius > 0.0)) {
    throw ConfigError("goal_radius must be positive");
  }
  if (!(bounds.min.x() < bounds.max.x() && bounds.min.y() < bounds.max.y())) {
    throw ConfigError("bounds must have positive extent");
  }
  if (!bounds.contains(goal.position())) {
    throw ConfigError("goal lies outside the workspace bounds");
  }
  for (const auto & o : obstacles) {
    if (!(o.half_extent > 0.0)) {
      throw ConfigError("obstacle half_extent must be positive");
    }
    if (!bounds.contains(o.center)) {
      throw ConfigError("obstacle lies outside the workspace bounds");
    }
  }
}

TeamState TeamState::from_pose(
  const Pose2 & object, double stick_length, Vec2 human_vel, Vec2 robot_vel,
  std::vector<double> windings, double time)
{
  if (!(stick_length > 0.0)) {
    throw DomainError("stick_length must be positive");
  }
  const double h = object.heading();
  const Vec2 half = Vec2(std::cos(h), std::sin(h)) * (0.5 * stick_length);
  TeamState s;
  s.object_ = object;
  s.human_end_ = object.position() + half;
  s.robot_end_ = object.position() - half;
  s.human_vel_ = human_vel;
  s.robot_vel_ = robot_vel;
  s.windings_ = std::move(windings);
  s.time_ = time;
  return s;
}

TeamState::TeamState(
  const Pose2 & object, Vec2 human_end, Vec2 robot_end, Vec2 human_vel, Vec2 robot_vel,
  std::vector<double> windings, double time, double stick_length)
: object_(object), human_end_(human_end), robot_end_(robot_end), human_vel_(human_vel),
  robot_vel_(robot_vel), windings_(std::move(windings)), time_(time)
{
  const Vec2 span = human_end - robot_end;
  if (std::abs(span.norm() - stick_length) > kRigidityTolerance) {
    throw DomainError("endpoint separation differs from the stick length");
  }
  const Vec2 mid = (human_end + robot_end) * 0.5;
  if ((mid - object.position()).norm() > kRigidityTolerance) {
    throw DomainError("object position is not the endpoint midpoint");
  }
  const double dh = normalize_angle(std::atan2(span.y(), span.x()) - object.heading());
  if (std::abs(dh) > kRigidityTolerance) {
    throw DomainError("object heading does not point from robot end to human end");
  }
  for (double w : windings_) {
    if (!std::isfinite(w)) {
      throw DomainError("winding numbers must be finite");
    }
  }
}

double signed_angle(const Vec2 & from, const Vec2 & to)
{
  if (from.squared_norm() == 0.0 || to.squared_norm() == 0.0) {
    throw DomainError("signed_angle of a zero vector");
  }
  const double a = std::atan2(from.cross(to), from.dot(to));
  // atan2 returns -pi for a negative-zero cross term; keep the (-pi, pi] convention.
  return a == -std::numbers::pi ? std::numbers::pi : a;
}

double point_segment_distance(const Vec2 & q, const Vec2 & a, const Vec2 & b)
{
  const Vec2 ab = b - a;
  const double len2 = ab.squared_norm();
  if (len2 == 0.0) {
    return (q - a).norm();
  }
  const double t = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
  return (q - (a + ab * t)).norm();
}

namespace
{

double point_box_distance(const Vec2 & p, const Obstacle & o)
{
  const double dx = std::max(std::abs(p.x() - o.center.x()) - o.half_extent, 0.0);
  const double dy = std::max(std::abs(p.y() - o.center.y()) - o.half_extent, 0.0);
  return std::hypot(dx, dy);
}

// Liang-Barsky clip of [a, b] against the box.
bool segment_hits_box(const Vec2 & a, const Vec2 & b, const Obstacle & o)
{
  const Vec2 d = b - a;
  double t0 = 0.0;
  double t1 = 1.0;
  const std::array<double, 4> p{-d.x(), d.x(), -d.y(), d.y()};
  const std::array<double, 4> q{
    a.x() - (o.center.x() - o.half_extent), (o.center.x() + o.half_extent) - a.x(),
    a.y() - (o.center.y() - o.half_extent), (o.center.y() + o.half_extent) - a.y()};
  for (std::size_t i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) {
        return false;
      }
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    if (t0 > t1) {
      return false;
    }
  }
  return true;
}

}  // namespace

double segment_square_distance(const Vec2 & a, const Vec2 & b, const Obstacle & obstacle)
{
  if (segment_hits_box(a, b, obstacle)) {
    return 0.0;
  }
  const double e = obstacle.half_extent;
  const Vec2 & c = obstacle.center;
  double best = std::min(point_box_distance(a, obstacle), point_box_distance(b, obstacle));
  for (const Vec2 corner : {c + Vec2(e, e), c + Vec2(-e, e), c + Vec2(e, -e), c + Vec2(-e, -e)}) {
    best = std::min(best, point_segment_distance(corner, a, b));
  }
  return best;
}

}  // namespace collab
