#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "uavmec/config.hpp"
#include "uavmec/physics.hpp"
#include "uavmec/types.hpp"

namespace uavmec {

// Placement of one UE's task in one TS. target 0 is local execution,
// 1..M is the serving UAV's 1-based index.
struct OffloadDecision {
  int target = 0;
  double energy = 0.0;     // J spent by the UE
  double alloc_cpu = 0.0;  // Hz granted to the task
  double tx_time = 0.0;    // s, 0 when local
};

// CPU share the UAV grants an admitted task: execution exactly fills what
// the deadline leaves after transmission.
inline double alloc_cpu(const Task& task, double tx_time, const SimConfig& cfg) {
  if (tx_time >= cfg.t_slot)
    throw std::domain_error("alloc_cpu: tx_time leaves no room before the deadline");
  return task.cycles / (cfg.t_slot - tx_time);
}

// Least-energy placement over {local} and every UAV that covers the UE and
// can still meet the deadline. Ties go to the lowest index, local first.
inline OffloadDecision choose_offload(Vec2 ue_pos, const Task& task,
                                      std::span<const UavPose> uav_poses,
                                      const SimConfig& cfg) {
  OffloadDecision best;
  best.target = 0;
  best.alloc_cpu = local_cpu_hz(task, cfg);
  best.energy = local_energy(task, best.alloc_cpu, cfg);
  best.tx_time = 0.0;
  for (std::size_t m = 0; m < uav_poses.size(); ++m) {
    const double r = horizontal_dist(ue_pos, uav_poses[m]);
    if (r > cfg.r_cov) continue;
    const double tx = offload_time(task, data_rate(r, cfg));
    if (tx >= cfg.t_slot) continue;
    const double e = offload_energy(tx, cfg);
    if (e < best.energy) {
      best.target = static_cast<int>(m) + 1;
      best.energy = e;
      best.alloc_cpu = alloc_cpu(task, tx, cfg);
      best.tx_time = tx;
    }
  }
  return best;
}

// Exhaustive reference: evaluates every placement with explicit constraint
// checks and scans for the minimum. Kept deliberately separate from
// choose_offload so the two act as independent routes to the same answer.
inline OffloadDecision brute_force_decision(Vec2 ue_pos, const Task& task,
                                            std::span<const UavPose> uav_poses,
                                            const SimConfig& cfg) {
  const int n_places = static_cast<int>(uav_poses.size()) + 1;
  std::vector<bool> feasible(n_places, false);
  std::vector<double> energy(n_places, 0.0);
  std::vector<double> alloc(n_places, 0.0);
  std::vector<double> tx(n_places, 0.0);

  // place 0: local. Always feasible; the chosen frequency meets the deadline.
  alloc[0] = task.cycles / cfg.t_slot;
  energy[0] = cfg.k_energy * std::pow(alloc[0], cfg.v_energy) * (task.cycles / alloc[0]);
  feasible[0] = exec_time(task, alloc[0]) <= cfg.t_slot;

  for (int place = 1; place < n_places; ++place) {
    const UavPose& pose = uav_poses[place - 1];
    const double r = horizontal_dist(ue_pos, pose);
    if (r > cfg.r_cov) continue;  // coverage constraint
    const double rate = data_rate(r, cfg);
    const double t_tr = task.data_bits / rate;
    if (t_tr >= cfg.t_slot) continue;  // nothing left for execution
    const double f = task.cycles / (cfg.t_slot - t_tr);
    if (t_tr + exec_time(task, f) > cfg.t_slot * (1.0 + 1e-12)) continue;  // deadline
    feasible[place] = true;
    energy[place] = cfg.tx_power * t_tr;
    alloc[place] = f;
    tx[place] = t_tr;
  }

  int best = 0;
  for (int place = 1; place < n_places; ++place) {
    if (feasible[place] && energy[place] < energy[best]) best = place;
  }
  return OffloadDecision{best, energy[best], alloc[best], tx[best]};
}

}  // namespace uavmec
