#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "uavmec/config.hpp"

namespace uavmec {

// Snapshot of the fairness/energy quantities of one TS, for export.
struct FairnessSnapshot {
  double f_u = 0.0;           // load fairness across UAVs
  double f_e = 0.0;           // service fairness across UEs
  double mean_energy = 0.0;   // J per UE
  std::vector<double> loads;  // relative UE-load per UAV this TS
};

// Jain index (sum v)^2 / (n * sum v^2), 0 by convention when all values are
// zero. In [1/n, 1] for any not-all-zero nonnegative vector.
inline double jain(std::span<const double> values) {
  double s = 0.0, q = 0.0;
  for (double v : values) {
    s += v;
    q += v * v;
  }
  if (q == 0.0) return 0.0;
  return (s * s) / (static_cast<double>(values.size()) * q);
}

// Fairness of the cumulative per-UAV loads up to the current TS.
inline double uav_load_fairness(std::span<const double> load_history) {
  return jain(load_history);
}

// Fairness of the cumulative per-UE service counts up to the current TS.
inline double ue_service_fairness(std::span<const double> served_counts) {
  return jain(served_counts);
}

// Per-agent reward of one TS: shared fairness-per-energy term minus the
// penalty if this agent's move was reverted.
inline double reward(double f_u, double f_e, std::span<const double> per_ue_energies,
                     bool violation, const SimConfig& cfg) {
  double total = 0.0;
  for (double e : per_ue_energies) total += e;
  const double mean_energy = total / static_cast<double>(per_ue_energies.size());
  if (mean_energy <= 0.0)
    throw std::domain_error("reward: mean energy must be positive");
  double r = (f_u * f_e) / mean_energy;
  if (violation) r -= cfg.penalty;
  return r;
}

}  // namespace uavmec
