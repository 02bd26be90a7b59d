#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "uavmec/config.hpp"
#include "uavmec/rng.hpp"
#include "uavmec/types.hpp"

namespace uavmec {

// Uniformly random direction and distance; the environment's stay rule
// keeps the UAV inside the area.
inline UavAction random_policy(Rng& rng, const SimConfig& cfg) {
  UavAction a;
  a.angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  if (a.angle >= 2.0 * std::numbers::pi) a.angle = 0.0;
  a.dist = rng.uniform(0.0, cfg.d_max);
  return a;
}

// Shared loop around the UE cluster center: every UAV tracks the same
// circle, offset by its own phase, completing two revolutions over the
// episode.
struct CirclePlan {
  Vec2 center;
  double radius = 0.0;
  double angular_step = 0.0;   // radians advanced per TS
  double d_cap = 0.0;          // per-TS flying distance limit
  std::vector<double> phases;  // per UAV
};

// Cluster center is the mean UE position; phases come from each UAV's
// initial bearing about the center so the UAVs never stack on one point.
inline CirclePlan make_circle_plan(std::span<const Vec2> ues,
                                   std::span<const UavPose> start_poses,
                                   const SimConfig& cfg) {
  if (ues.empty()) throw std::invalid_argument("make_circle_plan: no UEs");
  CirclePlan plan;
  for (const Vec2& ue : ues) {
    plan.center.x += ue.x;
    plan.center.y += ue.y;
  }
  plan.center.x /= static_cast<double>(ues.size());
  plan.center.y /= static_cast<double>(ues.size());
  plan.radius = cfg.r_cov;
  plan.angular_step = 2.0 * (2.0 * std::numbers::pi) / static_cast<double>(cfg.horizon);
  plan.d_cap = cfg.d_max;
  plan.phases.reserve(start_poses.size());
  for (const UavPose& p : start_poses)
    plan.phases.push_back(std::atan2(p.y - plan.center.y, p.x - plan.center.x));
  return plan;
}

// Fly toward the waypoint this TS's phase angle puts on the circle, capped
// at the per-TS distance limit.
inline UavAction circle_policy(const CirclePlan& plan, int uav_index, UavPose pose, int t) {
  const double theta = plan.phases[uav_index] +
                       static_cast<double>(t + 1) * plan.angular_step;
  const Vec2 target{plan.center.x + plan.radius * std::cos(theta),
                    plan.center.y + plan.radius * std::sin(theta)};
  UavAction a;
  a.dist = std::min(horizontal_dist(pose, target), plan.d_cap);
  double angle = std::atan2(target.y - pose.y, target.x - pose.x);
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  if (angle >= 2.0 * std::numbers::pi) angle = 0.0;
  a.angle = angle;
  return a;
}

}  // namespace uavmec
