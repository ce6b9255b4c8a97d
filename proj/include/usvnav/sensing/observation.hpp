#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

#include "usvnav/env/flow.hpp"

namespace usvnav {

/// Forward LiDAR fan. Beam i points at angle_min + i * (angle_max - angle_min)/(count - 1)
/// in the robot frame (0 = heading, counterclockwise positive).
struct SensorConfig {
  int beam_count = 61;
  double angle_min = -2.0 * std::numbers::pi / 3.0;
  double angle_max = 2.0 * std::numbers::pi / 3.0;
  double range = 10.0;  // d0

  double beam_angle(int i) const {
    if (beam_count == 1) return 0.5 * (angle_min + angle_max);
    return angle_min + (angle_max - angle_min) * i / (beam_count - 1);
  }
  std::vector<double> beam_angles() const {
    std::vector<double> a(static_cast<std::size_t>(beam_count));
    for (int i = 0; i < beam_count; ++i) a[static_cast<std::size_t>(i)] = beam_angle(i);
    return a;
  }
};

/// Partial observation in the robot frame (x forward, y to port).
struct Observation {
  Vec2 velocity;              // total (ground-relative) velocity
  Vec2 goal;                  // goal offset
  std::vector<double> lidar;  // ranges, each in (0, d0]
};

inline constexpr double kMinRange = 1e-6;

/// Distance along a half-line to the first intersection with a circle, or
/// +inf if the ray misses. An origin inside the circle reports kMinRange.
inline double ray_circle_distance(Vec2 origin, Vec2 dir, Vec2 center, double radius) {
  const Vec2 m = center - origin;
  const double c = m.squared_norm() - radius * radius;
  if (c <= 0.0) return kMinRange;
  const double b = dot(m, dir);
  if (b <= 0.0) return std::numeric_limits<double>::infinity();
  const double disc = b * b - c;
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  return b - std::sqrt(disc);
}

/// Beam ranges from `origin` along world-frame `angles`, clamped to `max_range`.
inline std::vector<double> raycast(std::span<const Obstacle> obstacles, Vec2 origin, std::span<const double> angles,
                                   double max_range) {
  std::vector<double> ranges(angles.size(), max_range);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const Vec2 dir = unit_from_angle(angles[i]);
    double best = max_range;
    for (const auto& o : obstacles) best = std::min(best, ray_circle_distance(origin, dir, o.center, o.radius));
    ranges[i] = std::max(best, kMinRange);
  }
  return ranges;
}

/// Robot-frame beams: the sensor fan rotated by the robot heading.
inline std::vector<double> raycast(const EnvironmentState& env, Vec2 origin, std::span<const double> robot_frame_angles,
                                   double max_range) {
  std::vector<double> world(robot_frame_angles.begin(), robot_frame_angles.end());
  for (auto& a : world) a += env.robot.heading;
  return raycast(env.obstacles, origin, world, max_range);
}

inline Observation observe(const EnvironmentState& env, const SensorConfig& sensor) {
  const RobotState& r = env.robot;
  Observation obs;
  obs.velocity = rotate(flow_at(env, r.position) + r.steering_velocity(), -r.heading);
  obs.goal = rotate(env.goal - r.position, -r.heading);
  const auto angles = sensor.beam_angles();
  obs.lidar = raycast(env, r.position, angles, sensor.range);
  return obs;
}

/// Network input: [velocity(2), goal(2), lidar/d0 (beam_count)], kept as
/// three contiguous groups for the per-source encoders.
class EncodedObservation {
 public:
  EncodedObservation() = default;
  explicit EncodedObservation(std::vector<float> flat) : flat_(std::move(flat)) {}

  std::span<const float> velocity() const { return std::span(flat_).subspan(0, 2); }
  std::span<const float> goal() const { return std::span(flat_).subspan(2, 2); }
  std::span<const float> lidar() const { return std::span(flat_).subspan(4); }
  std::span<const float> flat() const { return flat_; }
  std::size_t size() const { return flat_.size(); }

 private:
  std::vector<float> flat_;
};

inline EncodedObservation encode(const Observation& obs, const SensorConfig& sensor) {
  std::vector<float> flat;
  flat.reserve(4 + obs.lidar.size());
  flat.push_back(static_cast<float>(obs.velocity.x));
  flat.push_back(static_cast<float>(obs.velocity.y));
  flat.push_back(static_cast<float>(obs.goal.x));
  flat.push_back(static_cast<float>(obs.goal.y));
  for (double r : obs.lidar) flat.push_back(static_cast<float>(r / sensor.range));
  return EncodedObservation(std::move(flat));
}

/// LiDAR hits (beams shorter than d0) as robot-frame points.
inline std::vector<Vec2> reflection_points(const Observation& obs, const SensorConfig& sensor) {
  std::vector<Vec2> pts;
  for (int i = 0; i < static_cast<int>(obs.lidar.size()); ++i) {
    const double r = obs.lidar[static_cast<std::size_t>(i)];
    if (r < sensor.range) pts.push_back(unit_from_angle(sensor.beam_angle(i)) * r);
  }
  return pts;
}

}  // namespace usvnav
