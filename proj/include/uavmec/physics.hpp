#pragma once

#include <cmath>
#include <stdexcept>

#include "uavmec/config.hpp"
#include "uavmec/types.hpp"

namespace uavmec {

// Uplink rate for a UE at horizontal distance r from the serving UAV:
// B * log2(1 + rho * P / (H^2 + r^2)) with rho = g0 * g_ant / noise.
inline double data_rate(double horiz_dist, const SimConfig& cfg) {
  const double rho = cfg.g0 * cfg.g_ant / cfg.noise;
  const double snr = rho * cfg.tx_power /
                     (cfg.altitude * cfg.altitude + horiz_dist * horiz_dist);
  return cfg.bandwidth * std::log2(1.0 + snr);
}

// Time to ship the task's data at the given rate.
inline double offload_time(const Task& task, double rate) {
  if (rate <= 0.0) throw std::domain_error("offload_time: rate must be positive");
  return task.data_bits / rate;
}

// Time to execute the task at the given CPU frequency.
inline double exec_time(const Task& task, double cpu_hz) {
  if (cpu_hz <= 0.0) throw std::domain_error("exec_time: cpu_hz must be positive");
  return task.cycles / cpu_hz;
}

// Energy of executing the task locally at frequency f:
// k * f^v * (F/f) = k * f^(v-1) * F.
inline double local_energy(const Task& task, double cpu_hz, const SimConfig& cfg) {
  if (cpu_hz <= 0.0) throw std::domain_error("local_energy: cpu_hz must be positive");
  return cfg.k_energy * std::pow(cpu_hz, cfg.v_energy - 1.0) * task.cycles;
}

// Radio energy spent by the UE while transmitting for tx_time seconds.
inline double offload_energy(double tx_time, const SimConfig& cfg) {
  if (tx_time < 0.0) throw std::domain_error("offload_energy: tx_time must be nonnegative");
  return cfg.tx_power * tx_time;
}

// The local CPU runs at the lowest frequency that still meets the deadline,
// which also minimizes local energy for v >= 1.
inline double local_cpu_hz(const Task& task, const SimConfig& cfg) {
  return task.cycles / cfg.t_slot;
}

}  // namespace uavmec
