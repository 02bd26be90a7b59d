#pragma once

#include <cmath>
#include <vector>

namespace uavmec {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

// Planar Euclidean distance (UAVs share one altitude, UEs sit on the ground;
// only the horizontal component ever enters the model).
inline double horizontal_dist(Vec2 a, Vec2 b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

using UavPose = Vec2;

// One UE's computation task for one TS.
struct Task {
  double data_bits = 0.0;  // volume to offload
  double cycles = 0.0;     // total CPU cycles to execute
};

// Polar move command for one UAV in one TS.
struct UavAction {
  double angle = 0.0;  // radians, [0, 2*pi)
  double dist = 0.0;   // meters, [0, d_max]
};

// Mutable world snapshot between TSs. Counters are cumulative from the
// episode start; tasks are the ones to be placed in the upcoming TS.
struct WorldState {
  std::vector<UavPose> poses;
  int t = 0;                          // completed TSs
  std::vector<double> served_counts;  // per UE, TSs in which it offloaded
  std::vector<double> load_history;   // per UAV, accumulated relative load
  std::vector<Task> tasks;            // per UE, current TS
};

// Everything that happened in one TS, for logging and export.
struct StepRecord {
  int t = 0;                        // index of the executed TS
  std::vector<UavPose> poses;       // after movement
  std::vector<bool> violations;     // per UAV: move reverted this TS
  std::vector<int> decisions;       // per UE: 0 = local, 1..M = UAV index
  std::vector<double> energies;     // per UE, J
  double f_u = 0.0;
  double f_e = 0.0;
  std::vector<double> rewards;      // per agent
};

}  // namespace uavmec
