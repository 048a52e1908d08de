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

#ifndef COLLAB__WORKSPACE_HPP_
#define COLLAB__WORKSPACE_HPP_

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace collab
{

/// Raised when a geometric query is undefined (zero vectors, coincident points,
/// states violating the rigid-stick constraint).
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Raised for malformed configuration (scenario files, trial settings).
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Planar vector in meters (positions) or m/s (velocities).
///
/// The public constructor rejects NaN/Inf. Arithmetic on finite operands is
/// unchecked.
class Vec2
{
public:
  constexpr Vec2() = default;

  Vec2(double x, double y)
  : x_(x), y_(y)
  {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw DomainError("Vec2 components must be finite");
    }
  }

  constexpr double x() const {return x_;}
  constexpr double y() const {return y_;}

  constexpr Vec2 operator+(const Vec2 & o) const {return raw(x_ + o.x_, y_ + o.y_);}
  constexpr Vec2 operator-(const Vec2 & o) const {return raw(x_ - o.x_, y_ - o.y_);}
  constexpr Vec2 operator-() const {return raw(-x_, -y_);}
  constexpr Vec2 operator*(double s) const {return raw(x_ * s, y_ * s);}
  constexpr Vec2 operator/(double s) const {return raw(x_ / s, y_ / s);}
  constexpr Vec2 & operator+=(const Vec2 & o) {x_ += o.x_; y_ += o.y_; return *this;}
  constexpr Vec2 & operator-=(const Vec2 & o) {x_ -= o.x_; y_ -= o.y_; return *this;}

  constexpr bool operator==(const Vec2 &) const = default;

  constexpr double dot(const Vec2 & o) const {return x_ * o.x_ + y_ * o.y_;}
  /// z-component of the 3D cross product.
  constexpr double cross(const Vec2 & o) const {return x_ * o.y_ - y_ * o.x_;}
  double norm() const {return std::hypot(x_, y_);}
  constexpr double squared_norm() const {return x_ * x_ + y_ * y_;}

  /// Rotates counterclockwise by the angle whose cosine and sine are given.
  constexpr Vec2 rotated(double c, double s) const
  {
    return raw(c * x_ - s * y_, s * x_ + c * y_);
  }
  Vec2 rotated(double angle) const {return rotated(std::cos(angle), std::sin(angle));}

  /// Unit vector; throws DomainError on the zero vector.
  Vec2 normalized() const;

  /// Rescales to at most `cap` in norm, direction preserved.
  Vec2 clamped(double cap) const;

private:
  static constexpr Vec2 raw(double x, double y)
  {
    Vec2 v;
    v.x_ = x;
    v.y_ = y;
    return v;
  }

  double x_{0.0};
  double y_{0.0};
};

constexpr Vec2 operator*(double s, const Vec2 & v) {return v * s;}

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Planar pose of the transported object. Heading is kept in (-pi, pi].
class Pose2
{
public:
  Pose2() = default;
  Pose2(Vec2 position, double heading);

  const Vec2 & position() const {return position_;}
  double heading() const {return heading_;}

  bool operator==(const Pose2 &) const = default;

private:
  Vec2 position_;
  double heading_{0.0};
};

/// Axis-aligned square obstacle. Costs and inference only use the center.
struct Obstacle
{
  Vec2 center;
  double half_extent{0.075};
};

/// Axis-aligned rectangle.
struct Bounds
{
  Vec2 min{-1.4, -2.8};
  Vec2 max{1.4, 2.8};

  bool contains(const Vec2 & p) const
  {
    return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() && p.y() <= max.y();
  }
};

/// Task definition: goal pose, obstacle set, and the workspace boundary.
struct Context
{
  Pose2 goal;
  std::vector<Obstacle> obstacles;
  Bounds bounds;
  double goal_radius{0.46};
  double stick_length{0.914};

  /// Throws ConfigError if an invariant does not hold.
  void validate() const;
};

/// Object pose, both grasp points, their velocities and accumulated windings.
///
/// Construction enforces the rigid-stick invariants: endpoint separation equals
/// the stick length, the pose sits at the midpoint, and the heading points from
/// the robot end to the human end.
class TeamState
{
public:
  static constexpr double kRigidityTolerance = 1e-6;

  TeamState() = default;

  /// Builds a consistent state from the object pose; endpoints are derived.
  static TeamState from_pose(
    const Pose2 & object, double stick_length, Vec2 human_vel, Vec2 robot_vel,
    std::vector<double> windings, double time);

  /// Builds a state from explicit endpoints and pose, rejecting rigidity violations.
  TeamState(
    const Pose2 & object, Vec2 human_end, Vec2 robot_end, Vec2 human_vel, Vec2 robot_vel,
    std::vector<double> windings, double time, double stick_length);

  const Pose2 & object() const {return object_;}
  const Vec2 & human_end() const {return human_end_;}
  const Vec2 & robot_end() const {return robot_end_;}
  const Vec2 & human_vel() const {return human_vel_;}
  const Vec2 & robot_vel() const {return robot_vel_;}
  const std::vector<double> & windings() const {return windings_;}
  double time() const {return time_;}

  bool operator==(const TeamState &) const = default;

private:
  Pose2 object_;
  Vec2 human_end_;
  Vec2 robot_end_;
  Vec2 human_vel_;
  Vec2 robot_vel_;
  std::vector<double> windings_;
  double time_{0.0};
};

/// Counterclockwise-positive angle rotating `from` onto `to`, in (-pi, pi].
/// Throws DomainError if either vector is zero.
double signed_angle(const Vec2 & from, const Vec2 & to);

/// Distance from `q` to the closest point of segment [a, b].
double point_segment_distance(const Vec2 & q, const Vec2 & a, const Vec2 & b);

/// Distance between segment [a, b] and the closed square obstacle; zero on contact.
double segment_square_distance(const Vec2 & a, const Vec2 & b, const Obstacle & obstacle);

}  // namespace collab

#endif  // COLLAB__WORKSPACE_HPP_
