#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavmec/types.hpp"

namespace uavmec {

// Per-episode summary row of a training or evaluation run.
struct RunRecord {
  int episode = 0;
  std::vector<double> agent_rewards;  // accumulated over the episode
  double f_e = 0.0;                   // at the final TS
  double f_u = 0.0;
  double energy_j = 0.0;              // total UE energy over the episode
  double seconds = 0.0;               // wall clock
  std::uint64_t seed = 0;
};

namespace detail {

inline std::string fmt_full(double v) {  // round-trips exactly
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt_energy(double v) {  // joules, 12 significant digits
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace detail

inline std::string metrics_csv_header(int n_agents) {
  std::ostringstream os;
  os << "episode";
  for (int m = 0; m < n_agents; ++m) os << ",reward_" << m;
  os << ",f_e,f_u,energy_J,seconds,seed";
  return os.str();
}

// CSV export of run records. Column set is fixed by the header above;
// energies carry 12 significant digits, everything else full precision.
inline void write_metrics_csv(const std::vector<RunRecord>& records, int n_agents,
                              const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_metrics_csv: cannot open " + path);
  os << metrics_csv_header(n_agents) << '\n';
  for (const RunRecord& r : records) {
    os << r.episode;
    for (double v : r.agent_rewards) os << ',' << detail::fmt_full(v);
    os << ',' << detail::fmt_full(r.f_e) << ',' << detail::fmt_full(r.f_u) << ','
       << detail::fmt_energy(r.energy_j) << ',' << detail::fmt_full(r.seconds) << ','
       << r.seed << '\n';
  }
  if (!os) throw std::runtime_error("write_metrics_csv: write failed for " + path);
}

inline std::vector<RunRecord> read_metrics_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_metrics_csv: cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_metrics_csv: empty file");
  int n_agents = 0;
  {
    std::stringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ','))
      if (col.rfind("reward_", 0) == 0) ++n_agents;
  }
  std::vector<RunRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    RunRecord r;
    auto next = [&]() {
      if (!std::getline(ls, cell, ','))
        throw std::runtime_error("read_metrics_csv: short row");
      return cell;
    };
    r.episode = std::stoi(next());
    for (int m = 0; m < n_agents; ++m) r.agent_rewards.push_back(std::stod(next()));
    r.f_e = std::stod(next());
    r.f_u = std::stod(next());
    r.energy_j = std::stod(next());
    r.seconds = std::stod(next());
    r.seed = std::stoull(next());
    out.push_back(std::move(r));
  }
  return out;
}

// One JSON object per TS; streamed as JSON-lines by the harness.
inline nlohmann::json step_record_json(const StepRecord& rec, int episode) {
  nlohmann::json j;
  j["episode"] = episode;
  j["t"] = rec.t;
  auto poses = nlohmann::json::array();
  for (const auto& p : rec.poses) poses.push_back({p.x, p.y});
  j["poses"] = std::move(poses);
  j["violations"] = rec.violations;
  j["decisions"] = rec.decisions;
  j["energies"] = rec.energies;
  j["f_u"] = rec.f_u;
  j["f_e"] = rec.f_e;
  j["rewards"] = rec.rewards;
  return j;
}

}  // namespace uavmec
