#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "uavmec/config.hpp"
#include "uavmec/metrics.hpp"
#include "uavmec/offload.hpp"
#include "uavmec/physics.hpp"
#include "uavmec/rng.hpp"
#include "uavmec/types.hpp"

namespace uavmec {

// UEs are scattered uniformly over the square target area, once per run.
inline std::vector<Vec2> spawn_ues(const SimConfig& cfg, Rng& rng) {
  std::vector<Vec2> ues(cfg.n_ues);
  for (auto& ue : ues) {
    ue.x = rng.uniform(0.0, cfg.side_len);
    ue.y = rng.uniform(0.0, cfg.side_len);
  }
  return ues;
}

// One fresh task per UE: data volume uniform in the configured range,
// cycles = data * per-bit density.
inline std::vector<Task> spawn_tasks(const SimConfig& cfg, Rng& rng) {
  std::vector<Task> tasks(cfg.n_ues);
  for (auto& task : tasks) {
    task.data_bits = rng.uniform(cfg.data_min_bits(), cfg.data_max_bits());
    task.cycles = task.data_bits * rng.uniform(cfg.density_min, cfg.density_max);
  }
  return tasks;
}

inline bool in_bounds(Vec2 p, const SimConfig& cfg) {
  return p.x >= 0.0 && p.x <= cfg.side_len && p.y >= 0.0 && p.y <= cfg.side_len;
}

// Candidate position after applying the move command.
inline Vec2 move_candidate(UavPose pose, const UavAction& action) {
  return {pose.x + action.dist * std::cos(action.angle),
          pose.y + action.dist * std::sin(action.angle)};
}

// Single-UAV move with the stay-on-violation rule. other_poses are the
// positions the remaining UAVs occupy this TS (their own candidates when all
// move simultaneously). Returns the new pose and whether the move reverted.
inline std::pair<UavPose, bool> uav_step(UavPose pose, const UavAction& action,
                                         std::span<const UavPose> other_poses,
                                         const SimConfig& cfg) {
  if (action.angle < 0.0 || action.angle >= 2.0 * std::numbers::pi ||
      action.dist < 0.0 || action.dist > cfg.d_max)
    throw std::invalid_argument("uav_step: action out of range");
  const Vec2 cand = move_candidate(pose, action);
  bool violation = !in_bounds(cand, cfg);
  for (const auto& other : other_poses) {
    if (horizontal_dist(cand, other) < cfg.r_uav) {
      violation = true;
      break;
    }
  }
  return violation ? std::make_pair(pose, true) : std::make_pair(cand, false);
}

// Observation of agent m: own coordinates, distances to the other UAVs,
// cumulative per-UE service counts, cumulative per-UAV loads, in that order.
// Coordinates and distances are normalized by the side length, counters by
// the number of completed TSs. Length = 2 + (M-1) + N + M.
inline int obs_len(const SimConfig& cfg) {
  return 2 + (cfg.n_uavs - 1) + cfg.n_ues + cfg.n_uavs;
}

inline std::vector<double> observe(const WorldState& world, int agent,
                                   const SimConfig& cfg) {
  if (agent < 0 || agent >= cfg.n_uavs)
    throw std::out_of_range("observe: bad agent index");
  std::vector<double> obs;
  obs.reserve(obs_len(cfg));
  const UavPose& own = world.poses[agent];
  obs.push_back(own.x / cfg.side_len);
  obs.push_back(own.y / cfg.side_len);
  for (int m = 0; m < cfg.n_uavs; ++m) {
    if (m == agent) continue;
    obs.push_back(horizontal_dist(own, world.poses[m]) / cfg.side_len);
  }
  const double denom = std::max(world.t, 1);
  for (double c : world.served_counts) obs.push_back(c / denom);
  for (double l : world.load_history) obs.push_back(l / denom);
  return obs;
}

// Joint state: observations of all agents, agent 0 first.
inline std::vector<double> joint_state(const WorldState& world, const SimConfig& cfg) {
  std::vector<double> s;
  s.reserve(static_cast<std::size_t>(cfg.n_uavs) * obs_len(cfg));
  for (int m = 0; m < cfg.n_uavs; ++m) {
    auto obs = observe(world, m, cfg);
    s.insert(s.end(), obs.begin(), obs.end());
  }
  return s;
}

// UAV launch pads, corner-aligned; the first n_uavs slots are used.
inline std::vector<UavPose> initial_poses(const SimConfig& cfg) {
  const double lo = 0.1 * cfg.side_len;
  const double hi = 0.9 * cfg.side_len;
  const UavPose corners[4] = {{lo, lo}, {hi, hi}, {lo, hi}, {hi, lo}};
  return {corners, corners + cfg.n_uavs};
}

// Fresh world at the start of an episode: UAVs on their pads, counters
// zeroed, first TS's tasks drawn.
inline WorldState reset_world(const SimConfig& cfg, Rng& rng) {
  WorldState w;
  w.poses = initial_poses(cfg);
  w.t = 0;
  w.served_counts.assign(cfg.n_ues, 0.0);
  w.load_history.assign(cfg.n_uavs, 0.0);
  w.tasks = spawn_tasks(cfg, rng);
  return w;
}

struct StepResult {
  WorldState next;
  std::vector<double> rewards;  // per agent
  StepRecord record;
};

// Advance the world by one TS: move all UAVs simultaneously, place every
// UE's task by least energy, update the cumulative counters, and score each
// agent. rng only feeds the next TS's task draw.
inline StepResult env_step(const WorldState& world,
                           std::span<const UavAction> joint_action,
                           std::span<const Vec2> ues, const SimConfig& cfg,
                           Rng& rng) {
  if (world.t >= cfg.horizon)
    throw std::logic_error("env_step: episode horizon already reached");
  if (static_cast<int>(joint_action.size()) != cfg.n_uavs)
    throw std::invalid_argument("env_step: joint action size mismatch");

  const int M = cfg.n_uavs;
  const int N = cfg.n_ues;

  // All candidates first, then each is judged against the others' candidates.
  // A rejected UAV stays put; the pass is not iterated.
  std::vector<Vec2> candidates(M);
  for (int m = 0; m < M; ++m) {
    const UavAction& a = joint_action[m];
    if (a.angle < 0.0 || a.angle >= 2.0 * std::numbers::pi || a.dist < 0.0 ||
        a.dist > cfg.d_max)
      throw std::invalid_argument("env_step: action out of range");
    candidates[m] = move_candidate(world.poses[m], a);
  }

  StepResult out;
  out.next = world;
  out.record.t = world.t;
  out.record.violations.assign(M, false);

  for (int m = 0; m < M; ++m) {
    bool violation = !in_bounds(candidates[m], cfg);
    for (int o = 0; o < M && !violation; ++o) {
      if (o != m && horizontal_dist(candidates[m], candidates[o]) < cfg.r_uav)
        violation = true;
    }
    out.record.violations[m] = violation;
    out.next.poses[m] = violation ? world.poses[m] : candidates[m];
  }
  out.record.poses = out.next.poses;

  // Offloading decisions against the settled positions.
  out.record.decisions.resize(N);
  out.record.energies.resize(N);
  std::vector<double> ue_per_uav(M, 0.0);
  for (int n = 0; n < N; ++n) {
    const OffloadDecision dec =
        choose_offload(ues[n], world.tasks[n], out.next.poses, cfg);
    out.record.decisions[n] = dec.target;
    out.record.energies[n] = dec.energy;
    if (dec.target > 0) {
      ue_per_uav[dec.target - 1] += 1.0;
      out.next.served_counts[n] += 1.0;
    }
  }
  for (int m = 0; m < M; ++m)
    out.next.load_history[m] += ue_per_uav[m] / static_cast<double>(N);

  out.record.f_u = uav_load_fairness(out.next.load_history);
  out.record.f_e = ue_service_fairness(out.next.served_counts);

  out.rewards.resize(M);
  for (int m = 0; m < M; ++m) {
    out.rewards[m] = reward(out.record.f_u, out.record.f_e, out.record.energies,
                            out.record.violations[m], cfg);
  }
  out.record.rewards = out.rewards;

  out.next.t = world.t + 1;
  out.next.tasks = spawn_tasks(cfg, rng);
  return out;
}

}  // namespace uavmec
